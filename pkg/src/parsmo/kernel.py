"""Kernel evaluation and the LRU column cache for the implicit Hessian.

The dual Hessian has entries Q[s, r] = y_s * y_r * K(z_s, z_r) and is never
materialized. Columns are computed on demand and held in a bounded
least-recently-used cache; fresh column computations are the dominant cost
the solver is organized around, so the cache counts them.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("linear", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel function choice. gamma is the gaussian width exp(-gamma*|za-zb|^2)."""

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.gamma is not None and self.gamma > 0):
            raise ValueError("gaussian kernel requires gamma > 0")


def default_gamma(m):
    """Conventional gaussian width 1/m for an m-dimensional feature space."""
    return 1.0 / m


def kernel_value(spec, za, zb):
    """K(za, zb) for two sparse samples."""
    if za.indices.size and zb.indices.size:
        _, ia, ib = np.intersect1d(za.indices, zb.indices, assume_unique=True, return_indices=True)
        dot = float(za.values[ia] @ zb.values[ib]) if ia.size else 0.0
    else:
        dot = 0.0
    if spec.kind == "linear":
        return dot
    # |za - zb|^2 can round to a tiny negative when za == zb; clamp before exp.
    d2 = float(za.values @ za.values) + float(zb.values @ zb.values) - 2.0 * dot
    return math.exp(-spec.gamma * max(d2, 0.0))


def compute_column(dataset, spec, r):
    """Dense column Q[:, r] of the implicit Hessian, marked read-only."""
    zr = dataset.X[r].toarray().ravel()
    dots = dataset.X @ zr
    if spec.kind == "linear":
        k = dots
    else:
        d2 = dataset.squared_norms + dataset.squared_norms[r] - 2.0 * dots
        np.maximum(d2, 0.0, out=d2)
        d2[r] = 0.0  # self-distance is exactly zero, so the diagonal is exactly 1
        k = np.exp(-spec.gamma * d2)
    col = dataset.y * (dataset.y[r] * k)
    col.setflags(write=False)
    return col


class ColumnCache:
    """Bounded LRU map from column index to dense column, with miss coalescing.

    Hits touch recency under a short lock and return the stored array
    unchanged. On a miss, exactly one caller computes the column while
    concurrent requesters for the same index wait for it. resident_indices()
    is a snapshot and does not disturb recency. Counters only grow.
    """

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.capacity = capacity
        self.columns_computed = 0
        self.cache_hits = 0
        self._lock = threading.Lock()
        self._resident = OrderedDict()
        self._pending = {}

    def get(self, key, compute):
        while True:
            with self._lock:
                col = self._resident.get(key)
                if col is not None:
                    self._resident.move_to_end(key)
                    self.cache_hits += 1
                    return col
                waiter = self._pending.get(key)
                if waiter is None:
                    self._pending[key] = threading.Event()
                    break
            waiter.wait()
        try:
            col = compute(key)
        except BaseException:
            with self._lock:
                event = self._pending.pop(key)
            event.set()
            raise
        with self._lock:
            self.columns_computed += 1
            self._resident[key] = col
            self._resident.move_to_end(key)
            while len(self._resident) > self.capacity:
                self._resident.popitem(last=False)
            event = self._pending.pop(key)
            event.set()
        return col

    def resident_indices(self):
        with self._lock:
            return set(self._resident)


def get_column(cache, dataset, spec, r):
    """Column Q[:, r] through the cache, computing it at most once while resident."""
    if not 0 <= r < dataset.n:
        raise IndexError(f"column index {r} outside [0, {dataset.n})")
    return cache.get(int(r), lambda key: compute_column(dataset, spec, key))
