"""Proximal block subproblems and their inner solver.

Freezing every coordinate outside a block P leaves a small dense QP in x[P]:
the block's own Hessian slice plus a proximal term tau*I, a linear term
collecting the frozen cross-coupling, the box, and the block's share of the
equality constraint (y[P] @ x[P] must keep its current value). Blocks are
solved independently against the same snapshot, so each subproblem is
self-contained once built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import get_column
from .pairs import DENOM_TOL


class BlockSolveError(RuntimeError):
    """Inner solver failed to converge within its iteration cap."""


# A few ulps under 1: descent comparisons sit exactly on the boundary when the
# measured block is the worst pair itself.
DESCENT_SLACK = 1.0 - 1e-15


@dataclass(frozen=True)
class BlockSubproblem:
    block: np.ndarray    # coordinate indices, distinct
    labels: np.ndarray   # y restricted to the block
    qmat: np.ndarray     # Q[block, block], dense
    linear: np.ndarray   # grad restricted to block minus qmat @ anchor
    anchor: np.ndarray   # current x restricted to the block
    rhs: float           # labels @ anchor, the equality share to preserve
    tau: float
    C: float


@dataclass(frozen=True)
class BlockSolution:
    xhat: np.ndarray
    inner_iterations: int
    displacement: float  # |xhat - anchor|


def build_block(spec, state, cache, block, tau):
    """Assemble the frozen-complement subproblem for `block` at the current state.

    The linear term equals the cross-coupling sum over all other blocks minus
    one, but is computed as grad[block] - Q[block,block] @ x[block], which
    needs only the block's own columns.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    block = np.asarray(block, dtype=np.intp)
    if block.size == 0:
        raise ValueError("empty block")
    if np.unique(block).size != block.size:
        raise ValueError("block indices must be distinct")
    cols = [get_column(cache, spec.dataset, spec.kernel, int(h)) for h in block]
    qmat = np.column_stack([c[block] for c in cols])
    anchor = state.x[block].copy()
    labels = spec.dataset.y[block].copy()
    linear = state.grad[block] - qmat @ anchor
    return BlockSubproblem(block, labels, qmat, linear, anchor, float(labels @ anchor), tau, spec.C)


def solve_block(sub, inner_eta, max_inner=1_000_000):
    """Minimize the block objective plus its proximal term over the block slice.

    Runs worst-pair analytic steps on the reduced problem until its own
    optimality gap falls to inner_eta. The reduced Hessian is qmat + tau*I, so
    the proximal term only stiffens the diagonal. Degenerate blocks whose
    feasible slice is a single point return the anchor unchanged.
    """
    if inner_eta < 0:
        raise ValueError("inner_eta must be >= 0")
    p = sub.block.size
    H = sub.qmat + sub.tau * np.eye(p) if sub.tau > 0 else sub.qmat
    u = sub.anchor.copy()
    y, C = sub.labels, sub.C
    # reduced gradient at the anchor equals the full gradient restricted there
    g = sub.qmat @ u + sub.linear
    iterations = 0
    while True:
        up = ((y > 0) & (u < C)) | ((y < 0) & (u > 0))
        low = ((y < 0) & (u < C)) | ((y > 0) & (u > 0))
        if not up.any() or not low.any():
            break
        scores = -g * y
        a = int(np.argmax(np.where(up, scores, -np.inf)))
        b = int(np.argmin(np.where(low, scores, np.inf)))
        if scores[a] - scores[b] <= inner_eta:
            break
        if iterations >= max_inner:
            raise BlockSolveError(f"block solve exceeded {max_inner} inner iterations")
        da, db = 1.0 / y[a], -1.0 / y[b]
        room_a = u[a] if da < 0 else C - u[a]
        room_b = u[b] if db < 0 else C - u[b]
        limit = min(room_a, room_b)
        den = H[a, a] + H[b, b] - 2.0 * y[a] * y[b] * H[a, b]
        num = scores[a] - scores[b]
        t = limit if den <= DENOM_TOL else min(num / den, limit)
        if t <= 0.0:
            break  # no representable progress left
        u[a] += t * da
        u[b] += t * db
        if t == limit:
            # the limiting coordinate lands exactly on its bound; write it so
            if limit == room_a:
                u[a] = 0.0 if da < 0 else C
            if limit == room_b:
                u[b] = 0.0 if db < 0 else C
        np.clip(u, 0.0, C, out=u)
        g += t * (da * H[:, a] + db * H[:, b])
        iterations += 1
    return BlockSolution(u, iterations, float(np.linalg.norm(u - sub.anchor)))


def is_descent_block(solution, mvp_step_norm, descent_eps):
    """A block whose move is at least descent_eps times the worst-pair step.

    The threshold carries a few ulps of slack: at descent_eps = 1 the block
    around the worst pair lands exactly on the boundary, with both sides being
    the same length rounded through different arithmetic routes.
    """
    return solution.displacement >= descent_eps * mvp_step_norm * DESCENT_SLACK
