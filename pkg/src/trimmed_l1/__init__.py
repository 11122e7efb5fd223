"""Least trimmed absolute deviation (L1) location estimation."""

from .core import (
    DataError,
    EstimationResult,
    LocationEstimate,
    OracleSizeError,
    coordinate_median,
    lp_objective_f,
    lp_subgradient,
    ltad_objective,
    milp_objective,
    weighted_median_vector,
)
from .driver import DriverConfig, check_lemma1, estimate_ltad, heuristic_ltad, round_weights
from .oracle import oracle_milp, oracle_minlp
from .simulation import ScenarioSpec, generate_dataset, paper_table_suite, run_scenario
from .subgradient import SolverConfig, project_capped_simplex, solve_lp_ltad
from .univariate import enumerate_windows, solve_univariate

__version__ = "0.1.0"
