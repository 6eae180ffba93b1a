"""Trained-model serialization and prediction."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .kernel import KernelSpec


@dataclass
class SvmModel:
    """Support vectors with their dual weights, the kernel, and the bias.

    The decision value of a sample z is sum_r alpha_r*y_r*K(z_r, z) + bias;
    the predicted label is its sign, with ties going to +1.
    """

    kernel: KernelSpec
    C: float
    bias: float
    dim: int
    sv_alpha: np.ndarray
    sv_labels: np.ndarray
    sv_features: sp.csr_matrix  # n_sv x dim

    @classmethod
    def from_training(cls, spec, state, view):
        """Extract the support set (x > 0) and place the bias midway between
        the violation extremes. When one side is unbounded the finite side is
        used; with no information at all the bias is 0."""
        keep = np.flatnonzero(state.x > 0)
        gmax, gmin = view.gmax, view.gmin
        if np.isfinite(gmax) and np.isfinite(gmin):
            bias = 0.5 * (gmax + gmin)
        elif np.isfinite(gmax):
            bias = gmax
        elif np.isfinite(gmin):
            bias = gmin
        else:
            bias = 0.0
        ds = spec.dataset
        return cls(
            kernel=spec.kernel,
            C=spec.C,
            bias=float(bias),
            dim=ds.m,
            sv_alpha=state.x[keep].copy(),
            sv_labels=ds.y[keep].copy(),
            sv_features=sp.csr_matrix(ds.X[keep]),
        )

    def save(self, path):
        svs = []
        for r in range(self.sv_alpha.size):
            lo, hi = self.sv_features.indptr[r], self.sv_features.indptr[r + 1]
            feats = [
                [int(i) + 1, float(v)]
                for i, v in zip(self.sv_features.indices[lo:hi], self.sv_features.data[lo:hi])
            ]
            svs.append(
                {"alpha": float(self.sv_alpha[r]), "label": int(self.sv_labels[r]), "features": feats}
            )
        doc = {
            "kernel": {"kind": self.kernel.kind, "gamma": self.kernel.gamma},
            "C": self.C,
            "bias": self.bias,
            "dim": self.dim,
            "support_vectors": svs,
        }
        with open(path, "w", encoding="ascii") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
        dim = int(doc["dim"])
        data, indices, indptr = [], [], [0]
        alphas, labels = [], []
        for sv in doc["support_vectors"]:
            alphas.append(sv["alpha"])
            labels.append(sv["label"])
            for i, v in sv["features"]:
                indices.append(i - 1)
                data.append(v)
            indptr.append(len(data))
        features = sp.csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
            shape=(len(alphas), dim),
        )
        return cls(
            kernel=KernelSpec(doc["kernel"]["kind"], doc["kernel"]["gamma"]),
            C=float(doc["C"]),
            bias=float(doc["bias"]),
            dim=dim,
            sv_alpha=np.array(alphas, dtype=np.float64),
            sv_labels=np.array(labels, dtype=np.float64),
            sv_features=features,
        )

    def decision_values(self, dataset):
        """Decision values for every sample of a dataset."""
        if dataset.m > self.dim:
            raise ValueError(
                f"data has features up to index {dataset.m}, model was trained with {self.dim}"
            )
        if self.sv_alpha.size == 0:
            return np.full(dataset.n, self.bias)
        X = sp.csr_matrix((dataset.X.data, dataset.X.indices, dataset.X.indptr),
                          shape=(dataset.n, self.dim))
        dots = np.asarray((X @ self.sv_features.T).todense())
        if self.kernel.kind == "linear":
            K = dots
        else:
            test_sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
            sv_sq = np.asarray(self.sv_features.multiply(self.sv_features).sum(axis=1)).ravel()
            d2 = test_sq[:, None] + sv_sq[None, :] - 2.0 * dots
            np.maximum(d2, 0.0, out=d2)
            K = np.exp(-self.kernel.gamma * d2)
        return K @ (self.sv_alpha * self.sv_labels) + self.bias

    def predict(self, dataset):
        """Labels +1/-1; a zero decision value predicts +1."""
        return np.where(self.decision_values(dataset) >= 0.0, 1.0, -1.0)
