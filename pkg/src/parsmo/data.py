"""LIBSVM-format training data: parsing, serialization, subsetting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class DatasetError(ValueError):
    """Malformed or inconsistent training data."""


@dataclass(frozen=True)
class Sample:
    """One training vector in sparse form (0-based, strictly increasing indices)."""

    indices: np.ndarray
    values: np.ndarray


class Dataset:
    """n labeled sparse samples in an m-dimensional feature space.

    Features live in a CSR matrix so kernel columns reduce to sparse
    matrix-vector products. Labels are +1/-1, stored as float64.
    """

    def __init__(self, X, y, m=None):
        X = sp.csr_matrix(X)
        if m is not None:
            if m < X.shape[1]:
                raise DatasetError("declared dimension below max feature index")
            X = sp.csr_matrix((X.data, X.indices, X.indptr), shape=(X.shape[0], m))
        X.sort_indices()
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] == 0:
            raise DatasetError("empty dataset")
        if X.shape[1] < 1:
            raise DatasetError("dataset has no features")
        if y.shape != (X.shape[0],):
            raise DatasetError("label count does not match sample count")
        if not np.all(np.abs(y) == 1.0):
            raise DatasetError("labels must be +1 or -1")
        if not np.all(np.isfinite(X.data)):
            raise DatasetError("non-finite feature value")
        self.X = X
        self.y = y
        self._sqnorms = None

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]

    @property
    def squared_norms(self):
        """Per-sample squared Euclidean norms, computed once on demand."""
        if self._sqnorms is None:
            sq = self.X.multiply(self.X).sum(axis=1)
            self._sqnorms = np.asarray(sq).ravel()
        return self._sqnorms

    def sample(self, r):
        """Sparse view of row r."""
        lo, hi = self.X.indptr[r], self.X.indptr[r + 1]
        return Sample(self.X.indices[lo:hi], self.X.data[lo:hi])


def parse_libsvm(source):
    """Parse LIBSVM sparse text: one `<label> <idx>:<val> ...` sample per line.

    Labels must parse to exactly +1 or -1; feature indices are 1-based in the
    file and strictly increasing within a line. Blank lines are skipped.
    Raises DatasetError naming the offending line otherwise.
    """
    if hasattr(source, "read"):
        source = source.read()
    data, indices, indptr, labels = [], [], [0], []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        try:
            lab = float(parts[0])
        except ValueError:
            raise DatasetError(f"line {lineno}: label {parts[0]!r} is not numeric") from None
        if lab == 1.0:
            labels.append(1.0)
        elif lab == -1.0:
            labels.append(-1.0)
        else:
            raise DatasetError(f"line {lineno}: label must be +1 or -1, got {parts[0]!r}")
        prev = 0
        for tok in parts[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise DatasetError(f"line {lineno}: malformed feature {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise DatasetError(f"line {lineno}: malformed feature {tok!r}") from None
            if idx <= prev:
                raise DatasetError(
                    f"line {lineno}: feature indices must be strictly increasing "
                    f"positives, got {idx} after {prev}"
                )
            if not np.isfinite(val):
                raise DatasetError(f"line {lineno}: non-finite value {val_s!r}")
            indices.append(idx - 1)
            data.append(val)
            prev = idx
        indptr.append(len(data))
    if not labels:
        raise DatasetError("empty dataset")
    m = max(indices) + 1 if indices else 0
    if m < 1:
        raise DatasetError("dataset has no features")
    X = sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
        shape=(len(labels), m),
    )
    return Dataset(X, labels)


def load_libsvm(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_libsvm(fh)


def dump_libsvm(dataset):
    """Serialize back to LIBSVM text. repr() keeps float round-trips exact."""
    lines = []
    for r in range(dataset.n):
        s = dataset.sample(r)
        feats = " ".join(f"{i + 1}:{float(v)!r}" for i, v in zip(s.indices, s.values))
        label = "+1" if dataset.y[r] > 0 else "-1"
        lines.append(f"{label} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def save_libsvm(dataset, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_libsvm(dataset))


def take_subset(dataset, count, seed):
    """Seed-deterministic random subset of `count` samples, keeping dimension m."""
    if not 1 <= count <= dataset.n:
        raise DatasetError(f"subset size {count} outside [1, {dataset.n}]")
    idx = np.random.default_rng(seed).permutation(dataset.n)[:count]
    return Dataset(dataset.X[idx], dataset.y[idx], m=dataset.m)
