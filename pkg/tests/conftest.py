"""Shared fixtures and instance generators."""

import numpy as np
import pytest
import scipy.sparse as sp

from parsmo import Dataset, KernelSpec, ProblemSpec, parse_libsvm

FOUR_VAR_TEXT = "+1 1:1\n+1 2:1\n-1 3:1\n-1 4:1\n"


@pytest.fixture
def four_var_spec():
    """Four orthogonal unit samples under the linear kernel: the Hessian is the
    identity, the optimum is x = (1,1,1,1) with objective -2."""
    return ProblemSpec(parse_libsvm(FOUR_VAR_TEXT), KernelSpec("linear"), 1.0)


def random_dataset(rng, n, m=8, density=0.8):
    """Random dense-ish features with both labels guaranteed present."""
    Z = rng.standard_normal((n, m))
    Z[rng.random((n, m)) >= density] = 0.0
    y = rng.choice([-1.0, 1.0], size=n)
    y[0], y[1] = 1.0, -1.0
    return Dataset(sp.csr_matrix(Z), y, m=m)


def random_spec(seed, n, m=8, kernel="gaussian", C=1.0, gamma=None):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, n, m)
    if kernel == "gaussian":
        kspec = KernelSpec("gaussian", gamma if gamma is not None else 1.0 / m)
    else:
        kspec = KernelSpec("linear")
    return ProblemSpec(ds, kspec, C)


def binary_onehot_dataset(rng, n, m=123, active=14):
    """Sparse 0/1 rows with `active` hot features each and a planted linear
    separator plus label noise; the shape of the adult-census benchmark."""
    indices = np.empty(n * active, dtype=np.int64)
    for r in range(n):
        indices[r * active:(r + 1) * active] = rng.choice(m, size=active, replace=False)
    indices = indices.reshape(n, active)
    indices.sort(axis=1)
    data = np.ones(n * active)
    indptr = np.arange(0, n * active + 1, active)
    X = sp.csr_matrix((data, indices.ravel(), indptr.ravel()), shape=(n, m))
    w = rng.standard_normal(m)
    margin = X @ w + 0.5 * rng.standard_normal(n)
    y = np.where(margin >= np.median(margin), 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return Dataset(X, y, m=m)


def benchmark_spec(seed=7, n=2000, C=1.0):
    """The stand-in for a 2000-sample census-data subset: 123 binary features,
    gaussian kernel with gamma = 1/123."""
    rng = np.random.default_rng(seed)
    ds = binary_onehot_dataset(rng, n)
    return ProblemSpec(ds, KernelSpec("gaussian", 1.0 / 123.0), C)
