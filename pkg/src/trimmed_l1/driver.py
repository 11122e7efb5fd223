"""Iterative recentering around the relaxed solution, plus the heuristic baseline."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    EstimationResult,
    LocationEstimate,
    as_data_matrix,
    check_coverage,
    integrality_gap,
    l1_distances,
    ltad_objective,
    mad_scale,
)
from .subgradient import SolverConfig, solve_lp_ltad

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DriverConfig:
    m_tolerance: float = 1e-6
    max_outer_iterations: int = 100
    solver: SolverConfig = field(default_factory=SolverConfig)
    refit_median: bool = True
    standardize: bool = False

    def __post_init__(self):
        if self.m_tolerance <= 0:
            raise ValueError("m_tolerance must be positive")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")


def round_weights(w, X, m, h=None):
    """Indices of the ``h`` largest weights.

    Ties are broken by smaller L1 distance to ``m``, then by smaller index.
    ``h`` defaults to the rounded weight total.
    """
    w = np.asarray(w, dtype=float)
    if h is None:
        h = int(round(w.sum()))
    dist = l1_distances(X, m)
    order = np.lexsort((np.arange(w.size), dist, -w))
    return np.sort(order[:h])


def _finish(X, T, w, shift, m_star, scale, cfg, h, **extra):
    """Build the result in original units from working-unit quantities."""
    lp_location = (shift + m_star) * scale
    refit_m = np.median(X[T], axis=0)
    m = refit_m if cfg.refit_median else lp_location
    estimate = LocationEstimate(
        m=m,
        cumulative_shift=shift * scale,
        shift_location=lp_location,
        refit=cfg.refit_median,
        objective=ltad_objective(X, T, m),
    )
    return EstimationResult(
        estimate=estimate,
        selection=T,
        weights=w,
        integrality_gap=integrality_gap(w),
        h=h,
        method="lp",
        m_tolerance=cfg.m_tolerance,
        **extra,
    )


def estimate_ltad(X, h, cfg=DriverConfig()):
    """Trimmed L1 location by repeatedly solving the relaxation and recentering.

    Each round solves the relaxed problem on ``X - shift``; if the relaxed
    location is below ``m_tolerance`` the weights are accepted, otherwise the
    data is translated by it and the problem solved again.
    """
    X = as_data_matrix(X)
    n, p = X.shape
    h = check_coverage(h, n)
    scale = mad_scale(X) if cfg.standardize else np.ones(p)
    Z = X / scale

    shift = np.zeros(p)
    history = []
    best = None
    w_prev = None
    inner = 0
    for it in range(1, cfg.max_outer_iterations + 1):
        w, m_star, trace = solve_lp_ltad(Z - shift, h, cfg.solver, w0=w_prev)
        inner += trace.iterations
        m_norm = float(np.linalg.norm(m_star))
        lp_obj = trace.best_history[-1] if trace.best_history else trace.start_objective
        history.append({"shift": shift.copy(), "m_star": m_star.copy(), "lp_objective": lp_obj})
        T = round_weights(w, Z - shift, m_star, h)
        if m_norm < cfg.m_tolerance:
            return _finish(
                X, T, w, shift, m_star, scale, cfg, h,
                outer_iterations=it, converged=True, final_m_norm=m_norm,
                history=history, inner_iterations=inner,
            )
        candidate = _finish(
            X, T, w, shift, m_star, scale, cfg, h,
            outer_iterations=it, converged=False, final_m_norm=m_norm,
            history=history, inner_iterations=inner,
        )
        if best is None or candidate.estimate.objective < best.estimate.objective:
            best = candidate
        shift = shift + m_star
        w_prev = w

    log.info("recentering stopped after %d rounds, |m*|=%.3g", cfg.max_outer_iterations, m_norm)
    best.outer_iterations = cfg.max_outer_iterations
    best.inner_iterations = inner
    best.history = history
    return best


def check_lemma1(result, tol):
    """Integral final weights and a relaxed location within tolerance."""
    return bool(
        result.integrality_gap <= tol and result.final_m_norm <= result.m_tolerance
    )


def _concentrate(X, T, h, max_steps):
    """C-steps from subset ``T``; returns (T, m, objective trace)."""
    m = np.median(X[T], axis=0)
    objectives = [float(np.abs(X[T] - m).sum())]
    for _ in range(max_steps):
        dist = l1_distances(X, m)
        T_new = np.sort(np.lexsort((np.arange(X.shape[0]), dist))[:h])
        if np.array_equal(T_new, T):
            break
        T = T_new
        m = np.median(X[T], axis=0)
        objectives.append(float(np.abs(X[T] - m).sum()))
    return T, m, objectives


def heuristic_ltad(X, h, max_steps=100, restarts=10, seed=0):
    """Concentration-step search from random ``h``-subsets; best restart wins."""
    X = as_data_matrix(X)
    n, p = X.shape
    h = check_coverage(h, n)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        T0 = np.sort(rng.choice(n, size=h, replace=False))
        T, m, objectives = _concentrate(X, T0, h, max_steps)
        if best is None or objectives[-1] < best[2][-1]:
            best = (T, m, objectives, r)
    T, m, objectives, _ = best
    w = np.zeros(n)
    w[T] = 1.0
    estimate = LocationEstimate(
        m=m,
        cumulative_shift=np.zeros(p),
        shift_location=m,
        refit=True,
        objective=ltad_objective(X, T, m),
    )
    return EstimationResult(
        estimate=estimate,
        selection=T,
        weights=w,
        integrality_gap=0.0,
        outer_iterations=len(objectives) - 1,
        converged=True,
        h=h,
        method="heuristic",
        history=[{"objectives": objectives}],
    )
