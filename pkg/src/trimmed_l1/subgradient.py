"""Projected subgradient solver for the relaxed (LP) trimmed L1 problem.

The relaxation minimises ``f(w) = sum_i |w_i x_i - m(w)|_1`` over the capped
simplex, where ``m(w)`` is the per-column median of the shrunken rows.
``f`` is convex, so projected subgradient descent applies. The starting
point comes from alternating between the best weights for a fixed location
(solved through the one-multiplier Lagrangian dual) and the best location for
fixed weights.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DataError,
    as_data_matrix,
    check_coverage,
    column_median,
    lp_objective_f,
    weighted_median_vector,
)

PROJECTION_MODES = ("exact_capped_simplex", "paper_two_step")
STEP_SCHEDULES = ("constant", "diminishing", "normalized")
INIT_MODES = ("alternating_lagrangian", "uniform")
WARM_START_PATIENCE = 3


@dataclass(frozen=True)
class SolverConfig:
    step_alpha: float = 1.0
    step_schedule: str = "diminishing"
    w_tolerance: float = 1e-6
    max_iterations: int = 5000
    projection_mode: str = "exact_capped_simplex"
    init_mode: str = "alternating_lagrangian"
    tie_tolerance: float = 1e-12
    warm_start_rounds: int = 50
    stall_iterations: int = 500

    def __post_init__(self):
        if self.step_alpha <= 0 or self.w_tolerance <= 0 or self.tie_tolerance <= 0:
            raise ValueError("step size and tolerances must be positive")
        if self.max_iterations < 1 or self.stall_iterations < 0:
            raise ValueError("max_iterations must be >= 1")
        if self.projection_mode not in PROJECTION_MODES:
            raise ValueError(f"unknown projection_mode {self.projection_mode!r}")
        if self.step_schedule not in STEP_SCHEDULES:
            raise ValueError(f"unknown step_schedule {self.step_schedule!r}")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"unknown init_mode {self.init_mode!r}")


@dataclass
class SolveTrace:
    iterations: int = 0
    objective_history: list = field(default_factory=list)
    best_history: list = field(default_factory=list)
    final_step_norm: float = float("nan")
    converged: bool = False
    start_objective: float = float("nan")
    rounded: bool = False


# -- projections -------------------------------------------------------------


def project_hyperplane(v, h):
    v = np.asarray(v, dtype=float)
    return v + (h - v.sum()) / v.size


def project_paper_two_step(v, h):
    """Hyperplane projection followed by clipping to the unit box.

    The result can miss ``sum(w) = h`` when clipping is active; kept for
    comparison with :func:`project_capped_simplex`.
    """
    return np.clip(project_hyperplane(v, h), 0.0, 1.0)


def project_capped_simplex(v, h):
    """Euclidean projection onto ``{w : sum(w) = h, 0 <= w <= 1}``.

    The solution is ``clip(v - lam, 0, 1)``. The sum of that is piecewise
    linear and non-increasing in ``lam``, with slope changes at ``v_i - 1``
    (entering) and ``v_i`` (leaving); we walk the sorted kinks once and
    interpolate on the piece that crosses ``h``.
    """
    v = np.asarray(v, dtype=float)
    n = v.size
    if h > n:
        raise DataError(f"infeasible coverage h={h} > n={n}")
    if h < 0:
        raise DataError(f"infeasible coverage h={h} < 0")
    if h == n:
        return np.ones(n)
    if h == 0:
        return np.zeros(n)

    knots = np.concatenate([v - 1.0, v])
    dslope = np.concatenate([-np.ones(n), np.ones(n)])
    order = np.argsort(knots, kind="stable")
    knots, dslope = knots[order], dslope[order]
    slope = np.cumsum(dslope)
    sums = n + np.concatenate([[0.0], np.cumsum(slope[:-1] * np.diff(knots))])
    # First kink where the sum has dropped to h or below.
    k = int(np.searchsorted(-sums, -h, side="left"))
    if sums[k] == h or k == 0:
        lam = knots[k]
    else:
        lam = knots[k - 1] + (sums[k - 1] - h) / -slope[k - 1]
    w = np.clip(v - lam, 0.0, 1.0)

    # Remove the last few ulps of drift on the free coordinates.
    free = (w > 0.0) & (w < 1.0)
    if free.any():
        w[free] += (h - w.sum()) / free.sum()
        np.clip(w, 0.0, 1.0, out=w)
    return w


def project(v, h, mode="exact_capped_simplex"):
    if mode == "paper_two_step":
        return project_paper_two_step(v, h)
    return project_capped_simplex(v, h)


# -- Lagrangian warm start ---------------------------------------------------


def _row_candidates(X, m):
    """Breakpoints of each row's cost ``|w x_i - m|_1`` restricted to [0, 1].

    Returns ``(W, C)``: candidate weights (n, p + 2) and the cost at each.
    Out-of-range breakpoints are replaced by 0, which is already a candidate.
    """
    X = np.asarray(X, dtype=float)
    m = np.asarray(m, dtype=float)
    n, p = X.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(X != 0.0, m / X, 0.0)
    ratios = np.where((ratios > 0.0) & (ratios < 1.0), ratios, 0.0)
    W = np.concatenate([np.zeros((n, 1)), np.ones((n, 1)), ratios], axis=1)
    C = np.abs(W[:, :, None] * X[:, None, :] - m).sum(axis=2)
    return W, C


def _inner_argmin(W, C, delta, tie_tol):
    G = C - delta * W
    gmin = G.min(axis=1, keepdims=True)
    tol = tie_tol * np.maximum(1.0, np.abs(gmin))
    # Among (near-)minimisers take the largest weight.
    Wt = np.where(G <= gmin + tol, W, -np.inf)
    idx = Wt.argmax(axis=1)
    rows = np.arange(W.shape[0])
    return W[rows, idx], G[rows, idx]


def lagrangian_inner_w(x, m, delta, tie_tol=1e-12):
    """Minimise ``|w x - m|_1 - delta w`` over ``w`` in [0, 1].

    Returns ``(w, value)``; ties go to the larger ``w``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    W, C = _row_candidates(x[None, :], np.atleast_1d(m))
    w, g = _inner_argmin(W, C, delta, tie_tol)
    return float(w[0]), float(g[0])


def lagrangian_dual_w(X, m, h, tie_tol=1e-12, max_widen=60, bisect_steps=200):
    """Best weights for a fixed location under ``sum(w) = h``.

    The multiplier of the coverage constraint is found by bisection on the
    dual subgradient ``h - sum_i w_i(delta)``. Since the inner minimisers can
    jump at the optimal multiplier, the primal weights are the convex
    combination of the two bracket solutions that meets the coverage exactly.
    """
    X = as_data_matrix(X)
    n = X.shape[0]
    h = check_coverage(h, n)
    if h == n:
        return np.ones(n)
    W, C = _row_candidates(X, m)

    def weights(delta):
        return _inner_argmin(W, C, delta, tie_tol)[0]

    bound = np.abs(X).sum(axis=1).max() + 1.0
    lo, hi = -bound, bound
    for _ in range(max_widen):
        if weights(lo).sum() <= h <= weights(hi).sum():
            break
        lo, hi = 2.0 * lo, 2.0 * hi
    else:
        raise RuntimeError("dual bracket not found")

    w_lo, w_hi = weights(lo), weights(hi)
    for _ in range(bisect_steps):
        if w_lo.sum() == h:
            return project_capped_simplex(w_lo, h)
        if w_hi.sum() == h:
            return project_capped_simplex(w_hi, h)
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * (abs(lo) + abs(hi) + 1.0):
            break
        w_mid = weights(mid)
        if w_mid.sum() < h:
            lo, w_lo = mid, w_mid
        else:
            hi, w_hi = mid, w_mid
        if np.array_equal(w_lo, w_hi):
            break

    s_lo, s_hi = w_lo.sum(), w_hi.sum()
    theta = 0.0 if s_hi == s_lo else (s_hi - h) / (s_hi - s_lo)
    return project_capped_simplex(theta * w_lo + (1.0 - theta) * w_hi, h)


def uniform_weights(n, h):
    return np.full(n, h / n)


def warm_start(X, h, cfg=SolverConfig()):
    """Alternate exact weight and location updates from the uniform start.

    Falls back to the uniform start if the alternation does not improve it.
    """
    X = as_data_matrix(X)
    n = X.shape[0]
    h = check_coverage(h, n)
    w0 = uniform_weights(n, h)
    if h == n:
        return np.ones(n)
    if cfg.init_mode == "uniform":
        return w0
    best_w, best_f = w0, lp_objective_f(X, w0)
    w, stale = w0, 0
    m = weighted_median_vector(X, w)
    try:
        for _ in range(cfg.warm_start_rounds):
            w_new = lagrangian_dual_w(X, m, h, tie_tol=cfg.tie_tolerance)
            done = np.linalg.norm(w_new - w) < cfg.w_tolerance
            w = w_new
            f = lp_objective_f(X, w)
            # The alternation can cycle; keep the best point and stop once it stalls.
            if f < best_f * (1 - cfg.tie_tolerance):
                best_w, best_f, stale = w, f, 0
            else:
                stale += 1
            if done or stale >= WARM_START_PATIENCE:
                break
            m = weighted_median_vector(X, w)
    except RuntimeError:
        pass
    return best_w


# -- main loop ---------------------------------------------------------------


def _objective_and_subgradient(X, w):
    Z = w[:, None] * X
    R = Z - column_median(Z)
    return float(np.abs(R).sum()), (X * np.sign(R)).sum(axis=1)


def solve_lp_ltad(X, h, cfg=SolverConfig(), w0=None):
    """Minimise the relaxed objective by projected subgradient descent.

    Returns ``(w, m, trace)`` for the best iterate seen; the method is not
    monotone, so the last iterate is not reported. The loop ends when a step
    moves ``w`` by less than ``w_tolerance`` (``trace.converged``), when the
    best objective has not improved for ``stall_iterations`` steps, or at
    ``max_iterations``.
    """
    X = as_data_matrix(X)
    n = X.shape[0]
    h = check_coverage(h, n)
    trace = SolveTrace()

    w = warm_start(X, h, cfg) if w0 is None else np.asarray(w0, dtype=float).copy()
    f, g = _objective_and_subgradient(X, w)
    trace.start_objective = f
    best_w, best_f, best_k = w, f, 0
    if h == n:
        trace.converged = True
        trace.final_step_norm = 0.0
        return best_w, weighted_median_vector(X, best_w), trace

    for k in range(1, cfg.max_iterations + 1):
        alpha = cfg.step_alpha
        if cfg.step_schedule != "constant":
            alpha /= np.sqrt(k)
        if cfg.step_schedule == "normalized":
            gnorm = np.linalg.norm(g)
            alpha = alpha / gnorm if gnorm > 0 else 0.0
        w_new = project(w - alpha * g, h, cfg.projection_mode)
        step = float(np.linalg.norm(w_new - w))
        w = w_new
        f, g = _objective_and_subgradient(X, w)
        if f < best_f * (1 - cfg.tie_tolerance):
            best_w, best_f, best_k = w, f, k
        trace.iterations = k
        trace.objective_history.append(f)
        trace.best_history.append(best_f)
        trace.final_step_norm = step
        if step < cfg.w_tolerance:
            trace.converged = True
            break
        if cfg.stall_iterations and k - best_k >= cfg.stall_iterations:
            break

    # Subgradient iterates hover around a vertex optimum without landing on
    # it; the rounded point is kept whenever it is at least as good.
    w_int = np.zeros(n)
    w_int[np.argsort(-best_w, kind="stable")[:h]] = 1.0
    f_int = lp_objective_f(X, w_int)
    if f_int <= best_f + cfg.tie_tolerance * max(1.0, best_f):
        best_w, best_f = w_int, f_int
        trace.rounded = True

    return best_w, weighted_median_vector(X, best_w), trace
