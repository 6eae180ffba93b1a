"""Iterate state for the dual problem: maintained gradient, violation measures,
stopping test.

The problem is min 0.5*x@Q@x - sum(x) over {y@x = 0, 0 <= x <= C}. The
gradient Q@x - 1 is carried incrementally across steps so an iteration never
recomputes it from scratch; full recomputation exists only for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import KernelSpec, compute_column, get_column, kernel_value
from .pairs import max_feasible_step, pair_direction, pair_stepsize


class InfeasibleStepError(ValueError):
    """A step left the feasible set by more than tolerance."""


@dataclass(frozen=True)
class ProblemSpec:
    dataset: object
    kernel: KernelSpec
    C: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")

    @property
    def n(self):
        return self.dataset.n


@dataclass
class QPState:
    x: np.ndarray
    grad: np.ndarray
    fval: float
    k: int


@dataclass(frozen=True)
class ViolationView:
    """Snapshot of the eps-perturbed optimality structure at one iterate.

    up_mask/low_mask flag coordinates with room to move up/down the violation
    ordering; gmax/gmin are the extreme values of -grad*y over those sets
    (-inf/+inf when a set is empty). mvp is the most violating pair, or None
    when either set is empty, and mvp_step_norm is the Euclidean length of its
    analytic pair step: zero exactly at eps-optimal points.
    """

    eps: float
    up_mask: np.ndarray
    low_mask: np.ndarray
    up_set: np.ndarray
    low_set: np.ndarray
    gmax: float
    gmin: float
    mvp: tuple[int, int] | None
    mvp_step_norm: float


def init_zero(spec):
    """State at x = 0: gradient is exactly -1 and the objective is 0."""
    n = spec.n
    return QPState(np.zeros(n), -np.ones(n), 0.0, 0)


def full_gradient(spec, x, cache=None):
    """Q@x - 1 recomputed from kernel columns (verification path)."""
    g = -np.ones(spec.n)
    for r in np.flatnonzero(x):
        if cache is not None:
            col = get_column(cache, spec.dataset, spec.kernel, int(r))
        else:
            col = compute_column(spec.dataset, spec.kernel, int(r))
        g += x[r] * col
    return g


def objective(spec, x, cache=None):
    """0.5*x@Q@x - sum(x) recomputed from kernel columns."""
    g = full_gradient(spec, x, cache)
    # x@Q@x = x@(g + 1)
    return 0.5 * float(x @ g) - 0.5 * float(x.sum())


def direction_dot(vec, direction):
    """vec @ d for a sparse direction {index: component}."""
    return float(sum(vec[h] * v for h, v in direction.items()))


def direction_curvature(direction, columns):
    """d @ Q @ d from the Hessian columns of the direction's support."""
    items = sorted(direction.items())
    total = 0.0
    for h, v in items:
        col = columns[h]
        s = 0.0
        for l, w in items:
            s += w * col[l]
        total += v * s
    return float(total)


def apply_step(spec, state, direction, alpha, columns):
    """Move to x + alpha*d, maintaining gradient and objective incrementally.

    direction maps index -> component; columns must hold Q[:, h] for every
    moved h. The objective update alpha*g@d + 0.5*alpha^2*d@Q@d is exact for
    the quadratic. Bound overshoots within 1e-9*C are clamped; anything worse,
    or equality drift beyond 1e-9*n*C, raises InfeasibleStepError. alpha = 0
    leaves everything but the iteration counter unchanged.
    """
    if alpha != 0.0 and direction:
        support = sorted(direction)
        missing = [h for h in support if h not in columns]
        if missing:
            raise ValueError(f"missing kernel column for moved coordinates {missing}")
        gd = direction_dot(state.grad, direction)
        dqd = direction_curvature(direction, columns)
        x, C = state.x, spec.C
        box_tol = 1e-9 * C
        for h in support:
            xh = x[h] + alpha * direction[h]
            if xh < -box_tol or xh > C + box_tol:
                raise InfeasibleStepError(f"coordinate {h} leaves [0, C] by {max(-xh, xh - C):g}")
            x[h] = min(max(xh, 0.0), C)
        drift = abs(float(spec.dataset.y @ x))
        if drift > 1e-9 * spec.n * C:
            raise InfeasibleStepError(f"equality constraint drift {drift:g}")
        for h in support:  # fixed ascending order keeps the reduction deterministic
            state.grad += (alpha * direction[h]) * columns[h]
        state.fval += alpha * gd + 0.5 * alpha * alpha * dqd
    state.k += 1
    return state


def violation_view(spec, state, eps):
    """Violation snapshot with eps-perturbed index sets.

    A coordinate joins the up set when it can increase its own term of the
    constraint ordering (x <= C-eps with y=+1, or x >= eps with y=-1), and
    symmetrically for the low set. The worst pair's analytic step length
    measures how far from optimal the iterate is.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    x, g, y, C = state.x, state.grad, spec.dataset.y, spec.C
    up = ((y > 0) & (x <= C - eps)) | ((y < 0) & (x >= eps))
    low = ((y < 0) & (x <= C - eps)) | ((y > 0) & (x >= eps))
    up_set = np.flatnonzero(up)
    low_set = np.flatnonzero(low)
    if up_set.size == 0 or low_set.size == 0:
        return ViolationView(eps, up, low, up_set, low_set, -np.inf, np.inf, None, 0.0)
    scores = -g * y
    i = int(np.argmax(np.where(up, scores, -np.inf)))  # first max: lowest index wins ties
    j = int(np.argmin(np.where(low, scores, np.inf)))
    gmax, gmin = float(scores[i]), float(scores[j])
    if i == j:
        # both extremes at one free coordinate: no pair, and nothing violated
        return ViolationView(eps, up, low, up_set, low_set, gmax, gmin, None, 0.0)
    ds = spec.dataset
    si, sj = ds.sample(i), ds.sample(j)
    qii = kernel_value(spec.kernel, si, si)
    qjj = kernel_value(spec.kernel, sj, sj)
    qij = y[i] * y[j] * kernel_value(spec.kernel, si, sj)
    dir_i, dir_j = pair_direction(y, i, j)
    limit = max_feasible_step(x, C, i, j, dir_i, dir_j)
    t = pair_stepsize(g, y, i, j, qii, qjj, qij, limit)
    return ViolationView(eps, up, low, up_set, low_set, gmax, gmin, (i, j), t * math.sqrt(2.0))


def is_stopped(view, eta):
    """eps-perturbed stopping rule: empty side, or gmax <= gmin + eta."""
    return view.mvp is None or view.gmax <= view.gmin + eta


def relative_error(fval, fstar):
    """|fstar - fval| / |fstar|; undefined at fstar = 0."""
    if fstar == 0.0:
        raise ValueError("relative error undefined for fstar = 0; use absolute error")
    return abs(fstar - fval) / abs(fstar)
