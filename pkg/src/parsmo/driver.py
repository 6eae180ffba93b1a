"""Training loop for the parallel decomposition scheme.

Each iteration snapshots the violation structure, selects disjoint working
blocks (analytic pairs for the parsmo variants, a fixed partition otherwise),
solves every block independently against the snapshot, sums the block moves
into one sparse direction, and applies a single gathering stepsize chosen so
the combined move stays feasible and keeps the objective from growing. The
per-block moves are each optimal in isolation; the gathering step is what
makes adding them safe.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .blocks import DESCENT_SLACK, build_block, solve_block
from .kernel import ColumnCache, get_column
from .pairs import DENOM_TOL, solve_pair
from .qp import (
    apply_step,
    direction_curvature,
    direction_dot,
    init_zero,
    is_stopped,
    violation_view,
)

VARIANTS = ("parsmo1", "parsmo2", "blocks")
STEPSIZE_KINDS = ("exact", "armijo", "diminishing", "fixed")


@dataclass(frozen=True)
class StepsizeRule:
    """Gathering-step policy. `fixed` is a diagnostic that skips gathering."""

    kind: str = "exact"
    theta: float = 1e-3      # armijo sufficient-decrease fraction
    backtrack: float = 0.5   # armijo shrink factor
    xi: float = 0.7          # diminishing exponent, alpha_k = 1/k**xi
    value: float = 1.0       # fixed stepsize

    def __post_init__(self):
        if self.kind not in STEPSIZE_KINDS:
            raise ValueError(f"unknown stepsize rule {self.kind!r}")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if not 0 < self.xi <= 1:
            raise ValueError("xi must lie in (0, 1]")
        if not 0 < self.value <= 1:
            raise ValueError("fixed stepsize must lie in (0, 1]")

    @classmethod
    def exact(cls):
        return cls("exact")

    @classmethod
    def armijo(cls, theta=1e-3, backtrack=0.5):
        return cls("armijo", theta=theta, backtrack=backtrack)

    @classmethod
    def diminishing(cls, xi=0.7):
        return cls("diminishing", xi=xi)

    @classmethod
    def fixed(cls, value=1.0):
        return cls("fixed", value=value)


@dataclass(frozen=True)
class SolverConfig:
    """Driver settings. None for index_eps, tau or inner_eta means
    "resolve a default against the problem" (see resolved())."""

    q: int = 1
    variant: str = "parsmo1"
    block_size: int = 0
    stepsize: StepsizeRule = field(default_factory=StepsizeRule.exact)
    eta: float = 1e-3
    index_eps: float | None = None
    descent_eps: float = 0.5  # half the worst-pair progress still counts as descent;
                              # 1.0 is the theoretical boundary and proximal damping
                              # (tau > 0) pushes even the worst-pair block under it
    tau: float | None = None
    inner_eta: float | None = None
    max_iter: int = 1_000_000
    descent_period: int = 0   # force the worst pair into a blocks-mode selection
                              # whenever this many iterations pass without descent
    cache_capacity: int = 500
    threads: int = 1
    seed: int = 0
    shuffle_partition: bool = False
    deterministic: bool = True

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "blocks" and self.block_size < 1:
            raise ValueError("blocks variant needs block_size >= 1")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.index_eps is not None and self.index_eps < 0:
            raise ValueError("index_eps must be >= 0")
        if self.descent_eps < 0:
            raise ValueError("descent_eps must be >= 0")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.inner_eta is not None and self.inner_eta < 0:
            raise ValueError("inner_eta must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.descent_period < 0:
            raise ValueError("descent_period must be >= 0")
        if self.cache_capacity < 1:
            raise ValueError("cache_capacity must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolved(self, spec):
        """Fill problem-dependent defaults: index_eps = 1e-12*C, tau = 0 for
        gaussian kernels (unit diagonal already regularizes every pair slice)
        and 1e-6 for linear, inner_eta = eta/10."""
        changes = {}
        if self.index_eps is None:
            changes["index_eps"] = 1e-12 * spec.C
        if self.tau is None:
            changes["tau"] = 0.0 if spec.kernel.kind == "gaussian" else 1e-6
        if self.inner_eta is None:
            changes["inner_eta"] = self.eta / 10.0
        return replace(self, **changes) if changes else self


@dataclass(frozen=True)
class BlockSelection:
    blocks: list
    contains_mvp: bool


@dataclass
class IterationReport:
    k: int
    fval: float
    alpha: float
    blocks: list
    descent: bool
    gmax: float
    gmin: float
    mvp_step_norm: float
    fresh_columns: int   # computed during this iteration
    cols_total: int      # cumulative over the run
    hits_total: int
    elapsed: float = 0.0


@dataclass
class TrainResult:
    state: object
    reports: list
    status: str          # "optimal", "boundary_optimal" or "max_iter"
    cache: ColumnCache

    @property
    def converged(self):
        return self.status != "max_iter"


def _ranked(scores, members, reverse):
    """Members ordered by score (descending when reverse), lowest index on ties."""
    keys = -scores[members] if reverse else scores[members]
    return members[np.argsort(keys, kind="stable")]


def _greedy_pairs(up_ranked, low_ranked, q, used=None, first=None):
    """Match the two rankings position by position into up to q disjoint pairs.

    An index consumed on one side is skipped when it reappears on the other,
    and the next candidate from that ranking takes its place.
    """
    used = set() if used is None else set(used)
    pairs = [] if first is None else [first]
    iu = iter(up_ranked)
    il = iter(low_ranked)
    while len(pairs) < q:
        i = next((v for v in iu if v not in used), None)
        if i is None:
            break
        used.add(i)
        j = next((v for v in il if v not in used), None)
        if j is None:
            break
        used.add(j)
        pairs.append((int(i), int(j)))
    return pairs


def select_pairs_parsmo1(view, grad, y, q):
    """Up to q disjoint pairs by rank: the q strongest up-candidates matched
    with the q weakest low-candidates. Pair 1 is the most violating pair."""
    if view.mvp is None:
        return BlockSelection([], False)
    scores = -grad * y
    up_ranked = _ranked(scores, view.up_set, reverse=True)
    low_ranked = _ranked(scores, view.low_set, reverse=False)
    pairs = _greedy_pairs(up_ranked, low_ranked, q)
    return BlockSelection(pairs, bool(pairs) and pairs[0] == view.mvp)


def select_pairs_parsmo2(view, grad, y, q, resident):
    """Most violating pair plus up to q-1 pairs restricted to cache-resident
    coordinates, so an iteration computes at most the two worst-pair columns."""
    if view.mvp is None:
        return BlockSelection([], False)
    pairs = [view.mvp]
    if q > 1 and resident:
        scores = -grad * y
        res = np.fromiter(resident, dtype=np.intp)
        up_members = res[view.up_mask[res]]
        low_members = res[view.low_mask[res]]
        up_ranked = _ranked(scores, up_members, reverse=True)
        low_ranked = _ranked(scores, low_members, reverse=False)
        pairs = _greedy_pairs(up_ranked, low_ranked, q, used=view.mvp, first=view.mvp)
    return BlockSelection(pairs, True)


def partition_blocks(n, block_size, shuffle=False, seed=0):
    """Disjoint index blocks covering 0..n-1 in chunks of block_size."""
    idx = np.random.default_rng(seed).permutation(n) if shuffle else np.arange(n)
    return [tuple(int(v) for v in idx[s:s + block_size]) for s in range(0, n, block_size)]


def select_partition_blocks(n, block_size, view, force_mvp, shuffle=False, seed=0):
    """All blocks of the fixed partition; when forcing, the most violating pair
    is carved out of its blocks and appended as a block of its own."""
    blocks = partition_blocks(n, block_size, shuffle, seed)
    if not force_mvp or view.mvp is None:
        return BlockSelection(blocks, False)
    i, j = view.mvp
    carved = []
    for blk in blocks:
        rest = tuple(h for h in blk if h != i and h != j)
        if rest:
            carved.append(rest)
    carved.append((i, j))
    return BlockSelection(carved, True)


def exact_stepsize(x, C, grad, direction, dqd):
    """Minimizer of the objective along d, clipped to the feasible segment.

    Ascent directions return 0; zero curvature slides to the boundary. The
    feasible bound divides each coordinate's room by its component, so it is
    valid for components of any magnitude. The flatness test is relative to
    |d|^2: the absolute curvature shrinks with the square of the direction
    length near convergence, and treating such directions as flat would fire
    enormous steps."""
    gd = direction_dot(grad, direction)
    if gd >= 0.0:
        return 0.0
    limit = np.inf
    sqnorm = 0.0
    for h, v in direction.items():
        room = (C - x[h]) / v if v > 0 else x[h] / -v
        limit = min(limit, room)
        sqnorm += v * v
    if dqd <= DENOM_TOL * sqnorm:
        return float(limit)
    return float(max(min(-gd / dqd, limit), 0.0))


def armijo_stepsize(gd, dqd, theta=1e-3, backtrack=0.5):
    """Largest alpha in {1, c, c^2, ...} with sufficient decrease.

    The objective along d is quadratic, so the test uses alpha*gd +
    0.5*alpha^2*dqd directly and costs no kernel work."""
    if gd >= 0.0:
        raise ValueError("armijo needs a descent direction (grad @ d < 0)")
    alpha = 1.0
    while alpha * gd + 0.5 * alpha * alpha * dqd > theta * alpha * gd:
        alpha *= backtrack
        if alpha < 1e-16:
            raise ArithmeticError("armijo backtracking underflow")
    return alpha


def diminishing_stepsize(k, xi=0.7):
    """1/k**xi for iteration numbers k >= 1; never exceeds 1."""
    if k < 1:
        raise ValueError("iteration number must be >= 1")
    return min(1.0, float(k) ** -xi)


def assemble_direction(solutions):
    """Sum per-block moves (block indices, delta vector) into {index: component}.

    Blocks must not overlap; zero components are dropped, so a round of
    zero-step pairs assembles to an empty direction."""
    direction = {}
    seen = set()
    for block, delta in solutions:
        overlap = seen.intersection(block)
        if overlap:
            raise ValueError(f"blocks overlap at coordinates {sorted(overlap)}")
        seen.update(block)
        for h, v in zip(block, delta):
            if v != 0.0:
                direction[int(h)] = float(v)
    return direction


def _fetch_columns(spec, cache, indices, threads):
    """Columns for `indices`, touching resident ones first so fresh computes
    evict strangers rather than columns this iteration is about to use."""
    resident = cache.resident_indices()
    order = [h for h in indices if h in resident] + [h for h in indices if h not in resident]
    if threads > 1 and len(order) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(lambda h: get_column(cache, spec.dataset, spec.kernel, h), order))
        return dict(zip(order, cols))
    return {h: get_column(cache, spec.dataset, spec.kernel, h) for h in order}


def iterate(spec, state, config, cache, view=None, force_mvp=False):
    """One outer iteration: select, solve blocks against the snapshot, gather.

    Mutates `state` and returns an IterationReport. A selection that produces
    no movement (possible in blocks mode) still counts the iteration, with
    alpha = 0."""
    config = config.resolved(spec)
    if view is None:
        view = violation_view(spec, state, config.index_eps)
    y = spec.dataset.y
    cols_before = cache.columns_computed
    if config.variant == "parsmo1":
        selection = select_pairs_parsmo1(view, state.grad, y, config.q)
    elif config.variant == "parsmo2":
        selection = select_pairs_parsmo2(view, state.grad, y, config.q, cache.resident_indices())
    else:
        selection = select_partition_blocks(
            spec.n, config.block_size, view, force_mvp, config.shuffle_partition, config.seed
        )
    needed = sorted({h for blk in selection.blocks for h in blk})
    columns = _fetch_columns(spec, cache, needed, config.threads)

    solutions = []
    displacements = []
    if config.variant in ("parsmo1", "parsmo2"):
        for i, j in selection.blocks:
            ps = solve_pair(state.x, state.grad, y, spec.C, i, j, columns[i], columns[j])
            solutions.append(((i, j), np.array([ps.step * ps.dir_i, ps.step * ps.dir_j])))
            displacements.append(ps.displacement_norm())
    else:
        def solve_one(blk):
            sub = build_block(spec, state, cache, blk, config.tau)
            sol = solve_block(sub, config.inner_eta)
            return (blk, sol.xhat - sub.anchor), sol.displacement

        if config.threads > 1 and len(selection.blocks) > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                results = list(pool.map(solve_one, selection.blocks))
        else:
            results = [solve_one(blk) for blk in selection.blocks]
        for move, disp in results:
            solutions.append(move)
            displacements.append(disp)

    direction = assemble_direction(solutions)
    descent = any(d >= config.descent_eps * view.mvp_step_norm * DESCENT_SLACK for d in displacements)
    if direction:
        rule = config.stepsize
        if rule.kind == "exact":
            dqd = direction_curvature(direction, columns)
            alpha = exact_stepsize(state.x, spec.C, state.grad, direction, dqd)
        elif rule.kind == "armijo":
            gd = direction_dot(state.grad, direction)
            dqd = direction_curvature(direction, columns)
            alpha = armijo_stepsize(gd, dqd, rule.theta, rule.backtrack)
        elif rule.kind == "diminishing":
            alpha = diminishing_stepsize(state.k + 1, rule.xi)
        else:
            alpha = rule.value
    else:
        alpha = 0.0
    apply_step(spec, state, direction, alpha, columns)
    return IterationReport(
        k=state.k,
        fval=state.fval,
        alpha=alpha,
        blocks=selection.blocks,
        descent=descent,
        gmax=view.gmax,
        gmin=view.gmin,
        mvp_step_norm=view.mvp_step_norm,
        fresh_columns=cache.columns_computed - cols_before,
        cols_total=cache.columns_computed,
        hits_total=cache.cache_hits,
    )


def train(spec, config):
    """Run from x = 0 until the eps-perturbed optimality test passes, a side of
    the violation structure empties, or max_iter is reached."""
    config = config.resolved(spec)
    cache = ColumnCache(config.cache_capacity)
    state = init_zero(spec)
    reports = []
    status = "max_iter"
    last_descent = 0
    started = time.perf_counter()
    while True:
        view = violation_view(spec, state, config.index_eps)
        if is_stopped(view, config.eta):
            empty_side = view.up_set.size == 0 or view.low_set.size == 0
            status = "boundary_optimal" if empty_side else "optimal"
            break
        if state.k >= config.max_iter:
            break
        force = config.variant == "blocks" and (state.k - last_descent) >= config.descent_period
        report = iterate(spec, state, config, cache, view=view, force_mvp=force)
        report.elapsed = time.perf_counter() - started
        if report.descent:
            last_descent = state.k
        reports.append(report)
    return TrainResult(state, reports, status, cache)
