import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import lp_relaxation, qp_projection
from trimmed_l1.core import DataError, check_weights, coordinatewise_median, lp_objective_f
from trimmed_l1.subgradient import (
    SolverConfig,
    lagrangian_dual_w,
    lagrangian_inner_w,
    project_capped_simplex,
    project_hyperplane,
    project_paper_two_step,
    solve_lp_ltad,
    warm_start,
)

X4 = np.array([0.0, 1.0, 2.0, 10.0])[:, None]


def test_project_hyperplane():
    assert np.allclose(project_hyperplane([1, 1, 1, 1], 2), 0.5)
    w = np.array([0.2, 0.7, 0.1])
    assert np.allclose(project_hyperplane(w, 1.0), w, atol=1e-15)
    assert np.allclose(project_hyperplane([0, 0, 0], 3), 1.0)


def test_project_capped_simplex_examples():
    assert np.allclose(project_capped_simplex([2, 0, 0, 0], 2), [1, 1 / 3, 1 / 3, 1 / 3])
    assert np.array_equal(project_capped_simplex([10, 10, -10, -10], 2), [1, 1, 0, 0])
    w = np.array([0.5, 1.0, 0.0, 0.5])
    assert np.allclose(project_capped_simplex(w, 2), w, atol=1e-15)
    with pytest.raises(DataError, match="infeasible coverage"):
        project_capped_simplex([0.1, 0.2], 3)


def test_paper_two_step_counterexample():
    w = project_paper_two_step([2, 0, 0, 0], 2)
    assert np.array_equal(w, [1, 0, 0, 0])
    assert w.sum() == 1.0
    assert np.allclose(project_paper_two_step([1, 1, 1, 1], 2), 0.5)


vectors = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(-3, 4, allow_nan=False), min_size=n, max_size=n),
        st.integers(0, n),
    )
)


@settings(max_examples=100, deadline=None)
@given(vectors)
def test_projection_matches_qp_oracle(case):
    v, h = case
    assert np.allclose(project_capped_simplex(v, h), qp_projection(v, h), atol=1e-8)


@given(vectors)
def test_projection_feasible_and_idempotent(case):
    v, h = case
    w = project_capped_simplex(v, h)
    assert check_weights(w, h)
    assert np.allclose(project_capped_simplex(w, h), w, atol=1e-12)


@given(vectors, st.integers(0, 2**32 - 1))
def test_projection_nonexpansive(case, seed):
    v, h = case
    u = np.asarray(v) + np.random.default_rng(seed).normal(0, 1, len(v))
    lhs = np.linalg.norm(project_capped_simplex(v, h) - project_capped_simplex(u, h))
    assert lhs <= np.linalg.norm(np.asarray(v) - u) + 1e-12


@given(vectors)
def test_two_step_agrees_when_clipping_inactive(case):
    v, h = case
    wp = project_hyperplane(v, h)
    if np.all((wp >= 0) & (wp <= 1)):
        assert np.allclose(project_paper_two_step(v, h), project_capped_simplex(v, h), atol=1e-12)


def test_projection_large_scale_sum():
    rng = np.random.default_rng(0)
    v = rng.normal(0, 50, 2000)
    w = project_capped_simplex(v, 713)
    assert abs(w.sum() - 713) <= 1e-9


def test_lagrangian_inner_examples():
    w, val = lagrangian_inner_w([2.0], [1.0], 0.0)
    assert (w, val) == (0.5, 0.0)
    assert lagrangian_inner_w([0.0, 0.0], [1.0, -2.0], 0.5) == (1.0, 2.5)
    assert lagrangian_inner_w([0.0, 0.0], [1.0, -2.0], -0.5) == (0.0, 3.0)
    w, val = lagrangian_inner_w([1.0], [10.0], 0.0)
    assert (w, val) == (1.0, 9.0)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_lagrangian_inner_is_global_min(seed):
    rng = np.random.default_rng(seed)
    p = rng.integers(1, 5)
    x, m = rng.normal(0, 2, p), rng.normal(0, 2, p)
    delta = rng.normal(0, 3)
    w, val = lagrangian_inner_w(x, m, delta)
    grid = rng.uniform(0, 1, 200)
    g = np.abs(grid[:, None] * x - m).sum(axis=1) - delta * grid
    assert val <= g.min() + 1e-12
    assert val == pytest.approx(np.abs(w * x - m).sum() - delta * w, abs=1e-12)


def _fixed_m_lp_value(X, m, h):
    # brute force over a fine grid is hopeless; use the LP with m pinned
    from scipy.optimize import linprog

    n, p = X.shape
    nv = n + n * p
    A, b = [], []
    for i in range(n):
        for j in range(p):
            for s in (1.0, -1.0):
                row = np.zeros(nv)
                row[i] = s * X[i, j]
                row[n + i * p + j] = -1.0
                A.append(row)
                b.append(s * m[j])
    c = np.r_[np.zeros(n), np.ones(n * p)]
    res = linprog(c, A_ub=np.array(A), b_ub=b, A_eq=np.r_[np.ones(n), np.zeros(n * p)][None],
                  b_eq=[h], bounds=[(0, 1)] * n + [(0, None)] * (n * p), method="highs")
    return res.fun


def test_lagrangian_dual_examples():
    w = lagrangian_dual_w(X4, np.array([0.0]), 3)
    assert np.allclose(w, [1, 1, 1, 0])
    assert np.array_equal(lagrangian_dual_w(X4, np.array([1.0]), 4), np.ones(4))
    Xs = np.tile([1.5, -2.0], (6, 1))
    w = lagrangian_dual_w(Xs, np.array([0.3, 0.1]), 4)
    assert check_weights(w, 4)


def test_lagrangian_dual_solves_fixed_location_lp():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n, p = rng.integers(3, 9), rng.integers(1, 4)
        h = int(rng.integers(1, n))
        X = rng.standard_normal((n, p))
        m = rng.normal(0, 0.5, p)
        w = lagrangian_dual_w(X, m, h)
        assert check_weights(w, h)
        value = np.abs(w[:, None] * X - m).sum()
        assert value == pytest.approx(_fixed_m_lp_value(X, m, h), rel=1e-7, abs=1e-9)


def test_warm_start_examples():
    w = warm_start(X4, 3)
    assert check_weights(w, 3)
    assert lp_objective_f(X4, w) <= lp_objective_f(X4, np.full(4, 0.75))
    assert np.array_equal(np.argsort(-w)[:3].tolist(), [0, 1, 2]) or set(np.argsort(-w)[:3]) == {0, 1, 2}
    assert np.array_equal(warm_start(X4, 4), np.ones(4))

    sym = np.array([[-2.0, 1.0], [2.0, -1.0], [-0.5, 0.3], [0.5, -0.3], [-1.0, 2.0], [1.0, -2.0]])
    w = warm_start(sym, 4)
    from trimmed_l1.core import weighted_median_vector

    assert np.allclose(weighted_median_vector(sym, w), 0.0, atol=1e-12)


def test_warm_start_never_worse_than_uniform():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n, p = rng.integers(3, 15), rng.integers(1, 4)
        h = int(rng.integers(1, n))
        X = rng.standard_normal((n, p)) + rng.normal(0, 3, p)
        w = warm_start(X, h)
        assert check_weights(w, h)
        assert lp_objective_f(X, w) <= lp_objective_f(X, np.full(n, h / n)) + 1e-12


def test_solve_examples():
    w, m, trace = solve_lp_ltad(X4, 3)
    assert check_weights(w, 3)
    assert lp_objective_f(X4, w) <= 3.0 + 1e-6
    assert set(np.argsort(-w, kind="stable")[:3]) == {0, 1, 2}

    w, m, trace = solve_lp_ltad(np.zeros((5, 2)), 2)
    assert lp_objective_f(np.zeros((5, 2)), w) == 0.0
    assert trace.converged


def test_solve_h_equals_n_gives_median():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((9, 3))
    w, m, trace = solve_lp_ltad(X, 9)
    assert np.array_equal(w, np.ones(9))
    assert np.allclose(m, coordinatewise_median(X), atol=1e-9)


def test_best_history_non_increasing_and_not_worse_than_start():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((20, 3))
    w, m, trace = solve_lp_ltad(X, 10, SolverConfig(max_iterations=400))
    best = np.array(trace.best_history)
    assert np.all(np.diff(best) <= 0)
    assert lp_objective_f(X, w) <= trace.start_objective + 1e-12


def test_within_ten_percent_of_lp_optimum():
    rng = np.random.default_rng(8)
    for _ in range(10):
        X = rng.standard_normal((8, 2))
        h = 4
        lp_value, _, _ = lp_relaxation(X, h)
        w, _, _ = solve_lp_ltad(X, h)
        assert lp_objective_f(X, w) <= 1.10 * lp_value + 1e-9
        assert lp_objective_f(X, w) >= lp_value - 1e-7


@pytest.mark.parametrize("schedule", ["constant", "diminishing", "normalized"])
@pytest.mark.parametrize("mode", ["exact_capped_simplex", "paper_two_step"])
def test_solver_modes_run(schedule, mode):
    rng = np.random.default_rng(1)
    X = rng.standard_normal((12, 2))
    cfg = SolverConfig(step_schedule=schedule, projection_mode=mode, max_iterations=200)
    w, m, trace = solve_lp_ltad(X, 6, cfg)
    assert np.all(np.isfinite(w)) and 1 <= trace.iterations <= 200
    if mode == "exact_capped_simplex":
        assert check_weights(w, 6)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(step_alpha=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(projection_mode="nope")
