"""Synthetic problems shared by the demo scripts."""

import numpy as np
import scipy.sparse as sp

from parsmo import Dataset, KernelSpec, ProblemSpec, parse_libsvm

FOUR_VAR_TEXT = "+1 1:1\n+1 2:1\n-1 3:1\n-1 4:1\n"


def four_variable_spec():
    """Four orthogonal unit samples under the linear kernel: the Hessian is
    the identity and the optimum is x = (1,1,1,1) with objective -2."""
    return ProblemSpec(parse_libsvm(FOUR_VAR_TEXT), KernelSpec("linear"), 1.0)


def two_cluster_spec(seed=17, per_side=4, m=6, C=10.0):
    """Two tight clusters around +1 and -1: samples are strongly coupled, so
    summed per-pair moves overshoot unless a gathering step reins them in."""
    rng = np.random.default_rng(seed)
    up = rng.standard_normal((per_side, m)) * 0.05 + 1.0
    dn = rng.standard_normal((per_side, m)) * 0.05 - 1.0
    Z = np.vstack([up, dn])
    y = np.array([1.0] * per_side + [-1.0] * per_side)
    return ProblemSpec(Dataset(sp.csr_matrix(Z), y), KernelSpec("gaussian", 0.5 / m), C)


def onehot_spec(seed=7, n=2000, m=123, active=14, C=1.0):
    """Sparse 0/1 rows with a planted linear separator plus label noise, large
    enough that kernel column computation dominates the running time."""
    rng = np.random.default_rng(seed)
    indices = np.empty((n, active), dtype=np.int64)
    for r in range(n):
        indices[r] = rng.choice(m, size=active, replace=False)
    indices.sort(axis=1)
    X = sp.csr_matrix(
        (np.ones(n * active), indices.ravel(), np.arange(0, n * active + 1, active)),
        shape=(n, m),
    )
    w = rng.standard_normal(m)
    margin = X @ w + 0.5 * rng.standard_normal(n)
    y = np.where(margin >= np.median(margin), 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return ProblemSpec(Dataset(X, y, m=m), KernelSpec("gaussian", 1.0 / m), C)
