"""QP state maintenance, violation structure and the stopping rule."""

import numpy as np
import pytest

from parsmo import (
    ColumnCache,
    InfeasibleStepError,
    KernelSpec,
    ProblemSpec,
    parse_libsvm,
)
from parsmo.kernel import compute_column
from parsmo.qp import (
    apply_step,
    direction_curvature,
    direction_dot,
    full_gradient,
    init_zero,
    is_stopped,
    objective,
    relative_error,
    violation_view,
)
from conftest import random_spec
from oracles import dense_gradient, dense_objective, dense_q


def columns_for(spec, support):
    return {int(h): compute_column(spec.dataset, spec.kernel, int(h)) for h in support}


def test_problem_spec_validates_c():
    ds = parse_libsvm("+1 1:1\n-1 2:1\n")
    with pytest.raises(ValueError, match="C must be positive"):
        ProblemSpec(ds, KernelSpec("linear"), 0.0)


def test_init_zero(four_var_spec):
    state = init_zero(four_var_spec)
    assert np.array_equal(state.x, np.zeros(4))
    assert np.array_equal(state.grad, -np.ones(4))
    assert state.fval == 0.0 and state.k == 0


def test_full_gradient_and_objective_match_dense():
    sp_ = random_spec(61, 30, kernel="gaussian", C=1.5)
    Q = dense_q(sp_.dataset, sp_.kernel)
    rng = np.random.default_rng(61)
    x = rng.random(30) * 1.5
    x[rng.random(30) < 0.3] = 0.0
    g = full_gradient(sp_, x)
    assert np.allclose(g, dense_gradient(Q, x), atol=1e-10)
    assert objective(sp_, x) == pytest.approx(dense_objective(Q, x), abs=1e-10)


def test_full_gradient_through_cache():
    sp_ = random_spec(62, 15)
    x = np.zeros(15)
    x[3] = x[8] = 0.5
    cache = ColumnCache(10)
    g = full_gradient(sp_, x, cache)
    assert cache.columns_computed == 2
    assert np.allclose(g, full_gradient(sp_, x), atol=0)


def test_direction_helpers():
    vec = np.array([1.0, -2.0, 3.0])
    assert direction_dot(vec, {0: 2.0, 2: -1.0}) == -1.0
    cols = {0: np.array([2.0, 0.0, 1.0]), 2: np.array([1.0, 0.0, 3.0])}
    # d@Q@d with d = (1, 0, 1): Q00 + Q02 + Q20 + Q22 = 2 + 1 + 1 + 3
    assert direction_curvature({0: 1.0, 2: 1.0}, cols) == 7.0


def test_apply_step_tracks_dense_reference():
    """Incremental gradient and objective agree with recomputation step after step."""
    sp_ = random_spec(63, 25, kernel="gaussian", C=1.0)
    Q = dense_q(sp_.dataset, sp_.kernel)
    rng = np.random.default_rng(63)
    state = init_zero(sp_)
    for _ in range(60):
        i, j = rng.choice(25, size=2, replace=False)
        d = {int(i): float(sp_.dataset.y[i]), int(j): float(-sp_.dataset.y[j])}
        cols = columns_for(sp_, d)
        room = min(
            state.x[h] if v < 0 else 1.0 - state.x[h]
            for h, v in ((h, v) for h, v in d.items())
        )
        alpha = rng.random() * room
        apply_step(sp_, state, d, alpha, cols)
        assert np.allclose(state.grad, dense_gradient(Q, state.x), atol=1e-10)
        assert state.fval == pytest.approx(dense_objective(Q, state.x), abs=1e-10)
        assert abs(sp_.dataset.y @ state.x) < 1e-12
    assert state.k == 60


def test_apply_step_zero_alpha_counts_iteration(four_var_spec):
    state = init_zero(four_var_spec)
    before = state.x.copy()
    apply_step(four_var_spec, state, {0: 1.0, 2: 1.0}, 0.0, {})
    assert state.k == 1
    assert np.array_equal(state.x, before)
    assert state.fval == 0.0


def test_apply_step_requires_columns(four_var_spec):
    state = init_zero(four_var_spec)
    cols = columns_for(four_var_spec, [0])
    with pytest.raises(ValueError, match="missing kernel column"):
        apply_step(four_var_spec, state, {0: 1.0, 2: 1.0}, 0.5, cols)


def test_apply_step_rejects_box_violation(four_var_spec):
    state = init_zero(four_var_spec)
    cols = columns_for(four_var_spec, [0, 2])
    with pytest.raises(InfeasibleStepError, match="leaves \\[0, C\\]"):
        apply_step(four_var_spec, state, {0: 1.0, 2: 1.0}, 1.5, cols)


def test_apply_step_clamps_rounding_overshoot(four_var_spec):
    state = init_zero(four_var_spec)
    cols = columns_for(four_var_spec, [0, 2])
    apply_step(four_var_spec, state, {0: 1.0, 2: 1.0}, 1.0 + 1e-13, cols)
    assert state.x[0] == 1.0 and state.x[2] == 1.0


def test_apply_step_rejects_equality_drift(four_var_spec):
    state = init_zero(four_var_spec)
    cols = columns_for(four_var_spec, [0, 1])
    # both moved coordinates have label +1, so y@x drifts by 2*alpha
    with pytest.raises(InfeasibleStepError, match="equality constraint drift"):
        apply_step(four_var_spec, state, {0: 1.0, 1: 1.0}, 0.5, cols)


def test_violation_view_four_var_origin(four_var_spec):
    state = init_zero(four_var_spec)
    view = violation_view(four_var_spec, state, 1e-12)
    assert set(view.up_set) == {0, 1}
    assert set(view.low_set) == {2, 3}
    assert view.gmax == 1.0 and view.gmin == -1.0
    assert view.mvp == (0, 2)  # lowest indices win the ties
    assert view.mvp_step_norm == pytest.approx(np.sqrt(2.0))


def test_violation_view_eps_excludes_near_bound():
    """A coordinate within eps of its blocking bound leaves the index set."""
    ds = parse_libsvm("+1 1:1\n-1 2:1\n")
    sp_ = ProblemSpec(ds, KernelSpec("linear"), 1.0)
    state = init_zero(sp_)
    eps = 1e-6
    state.x[:] = [1.0 - eps / 2, 1.0 - eps / 2]
    state.grad[:] = dense_gradient(dense_q(ds, sp_.kernel), state.x)
    view = violation_view(sp_, state, eps)
    # sample 0 (y=+1) sits above C-eps: not in up; sample 1 (y=-1) likewise
    assert not view.up_mask[0] and not view.low_mask[1]
    # both can still move back down/up
    assert view.low_mask[0] and view.up_mask[1]


def test_violation_view_single_free_coordinate():
    # one coordinate in both sets and no partner: mvp is None, gap closed
    ds = parse_libsvm("+1 1:1\n+1 2:1\n-1 3:1\n")
    sp_ = ProblemSpec(ds, KernelSpec("linear"), 1.0)
    state = init_zero(sp_)
    state.x[:] = [0.5, 1.0, 0.0]
    state.grad[:] = [0.5, 0.0, -1.0]
    # eps large enough to evict x=1 and x=0 coordinates of matching labels
    view = violation_view(sp_, state, 0.1)
    assert view.mvp is None or view.mvp[0] != view.mvp[1]


def test_violation_view_mvp_is_worst_pair():
    """The reported pair attains the extreme scores over the index sets."""
    sp_ = random_spec(64, 40, kernel="gaussian", C=1.0)
    rng = np.random.default_rng(64)
    state = init_zero(sp_)
    state.x[:] = np.round(rng.random(40), 1)
    state.grad[:] = dense_gradient(dense_q(sp_.dataset, sp_.kernel), state.x)
    eps = 1e-12
    view = violation_view(sp_, state, eps)
    scores = -state.grad * sp_.dataset.y
    assert view.gmax == pytest.approx(scores[view.up_set].max())
    assert view.gmin == pytest.approx(scores[view.low_set].min())
    i, j = view.mvp
    assert view.up_mask[i] and view.low_mask[j]
    assert scores[i] == view.gmax and scores[j] == view.gmin


def test_violation_view_rejects_negative_eps(four_var_spec):
    with pytest.raises(ValueError):
        violation_view(four_var_spec, init_zero(four_var_spec), -1e-9)


def test_is_stopped_cases(four_var_spec):
    state = init_zero(four_var_spec)
    view = violation_view(four_var_spec, state, 1e-12)
    assert not is_stopped(view, 1e-3)   # gap is 2
    assert is_stopped(view, 2.0)        # eta covers the gap
    # at the optimum the scores equalize
    state.x[:] = 1.0
    state.grad[:] = [0.0, 0.0, 0.0, 0.0]
    opt_view = violation_view(four_var_spec, state, 1e-12)
    assert is_stopped(opt_view, 1e-10)


def test_relative_error():
    assert relative_error(-1.98, -2.0) == pytest.approx(0.01)
    assert relative_error(-2.0, -2.0) == 0.0
    with pytest.raises(ValueError):
        relative_error(1.0, 0.0)


def test_gradient_maintenance_many_steps():
    """Maintained gradient stays within 1e-8 of recomputation over a long run."""
    sp_ = random_spec(65, 50, kernel="linear", C=2.0)
    rng = np.random.default_rng(65)
    state = init_zero(sp_)
    y = sp_.dataset.y
    for _ in range(300):
        i, j = rng.choice(50, size=2, replace=False)
        d = {int(i): float(y[i]), int(j): float(-y[j])}
        room = min(state.x[h] if v < 0 else 2.0 - state.x[h] for h, v in d.items())
        if room <= 0:
            continue
        cols = columns_for(sp_, d)
        apply_step(sp_, state, d, rng.random() * room, cols)
    fresh = full_gradient(sp_, state.x)
    denom = max(1.0, float(np.abs(fresh).max()))
    assert float(np.abs(state.grad - fresh).max()) / denom <= 1e-8
