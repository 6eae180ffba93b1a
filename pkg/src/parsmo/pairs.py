"""Closed-form solution of the two-variable working-set subproblem.

A pair (i, j) moves along the direction with d_i = 1/y_i, d_j = -1/y_j and
zeros elsewhere, which keeps y@x constant. The optimal stepsize along that
segment has the classical analytic form; everything here is O(1) given the
two Hessian columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Curvatures at or below this are treated as zero (PSD up to rounding).
DENOM_TOL = 1e-12


@dataclass(frozen=True)
class PairStep:
    i: int
    j: int
    dir_i: float
    dir_j: float
    step: float        # optimal stepsize along (dir_i, dir_j), in [0, step_limit]
    step_limit: float  # largest box-feasible stepsize

    def displacement(self):
        """Moved coordinates as {index: delta}; empty when the step is zero."""
        if self.step == 0.0:
            return {}
        return {self.i: self.step * self.dir_i, self.j: self.step * self.dir_j}

    def displacement_norm(self):
        # both direction components have unit magnitude
        return abs(self.step) * math.sqrt(2.0)


def pair_direction(y, i, j):
    """Equality-preserving direction components (1/y_i, -1/y_j)."""
    if i == j:
        raise ValueError("pair indices must differ")
    return 1.0 / y[i], -1.0 / y[j]


def max_feasible_step(x, C, i, j, dir_i, dir_j):
    """Largest t with both moved coordinates still inside [0, C]. May be 0."""
    room_i = x[i] if dir_i < 0 else C - x[i]
    room_j = x[j] if dir_j < 0 else C - x[j]
    return max(min(room_i, room_j), 0.0)


def pair_stepsize(grad, y, i, j, qii, qjj, qij, step_limit):
    """Optimal stepsize for pair (i, j): the unconstrained minimizer clipped to
    [0, step_limit], with a non-violating pair returning 0 and a flat slice
    running to the box."""
    num = -(grad[i] * y[i] - grad[j] * y[j])
    if num <= 0.0:
        return 0.0
    den = qii + qjj - 2.0 * y[i] * y[j] * qij
    if den <= DENOM_TOL:
        return step_limit
    return min(num / den, step_limit)


def solve_pair(x, grad, y, C, i, j, col_i, col_j):
    """Analytic step for pair (i, j) given the two Hessian columns."""
    dir_i, dir_j = pair_direction(y, i, j)
    limit = max_feasible_step(x, C, i, j, dir_i, dir_j)
    t = pair_stepsize(grad, y, i, j, col_i[i], col_j[j], col_i[j], limit)
    return PairStep(int(i), int(j), dir_i, dir_j, t, limit)
