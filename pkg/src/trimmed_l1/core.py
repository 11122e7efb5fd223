"""Shared data handling, L1 geometry and the trimmed objectives.

Conventions used across the package:

* a data matrix is a float ``ndarray`` of shape ``(n, p)``;
* a weight vector lives in the capped simplex ``{w : sum(w) = h, 0 <= w <= 1}``;
* a selection is a sorted integer array of ``h`` distinct 0-based row indices.
"""

from dataclasses import dataclass, field

import numpy as np

WEIGHT_TOL = 1e-9


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class OracleSizeError(ValueError):
    """Enumeration instance exceeds the size guard."""


def as_data_matrix(X):
    """Return ``X`` as a finite float array of shape ``(n, p)``.

    One-dimensional input is treated as ``n`` univariate observations.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"expected a 2-d data matrix, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError("empty input")
    if not np.all(np.isfinite(X)):
        raise DataError("data contains non-finite entries")
    return X


def as_selection(T, n):
    T = np.unique(np.asarray(T, dtype=np.intp))
    if T.size and (T[0] < 0 or T[-1] >= n):
        raise DataError(f"selection indices out of range for n={n}")
    return T


def check_coverage(h, n, minimum=1):
    if int(h) != h or not minimum <= h <= n:
        raise DataError(f"invalid coverage h={h} for n={n}")
    return int(h)


def check_weights(w, h, tol=WEIGHT_TOL):
    """True iff ``w`` lies in the capped simplex for coverage ``h``."""
    w = np.asarray(w, dtype=float)
    return bool(
        np.all(w >= -tol) and np.all(w <= 1 + tol) and abs(w.sum() - h) <= tol
    )


def integrality_gap(w):
    w = np.asarray(w, dtype=float)
    return float(np.minimum(w, 1.0 - w).clip(min=0.0).sum())


def coordinate_median(v):
    """Median with the mid-value / average-of-middles convention."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise DataError("empty input")
    return float(np.median(v))


def coordinatewise_median(X):
    X = as_data_matrix(X)
    return np.median(X, axis=0)


def column_median(Z):
    """``np.median(Z, axis=0)`` for finite 2-d input, without the NaN handling."""
    n = Z.shape[0]
    k = n // 2
    if n % 2:
        return np.partition(Z, k, axis=0)[k]
    part = np.partition(Z, (k - 1, k), axis=0)
    return (part[k - 1] + part[k]) / 2.0


def weighted_median_vector(X, w):
    """Per-column median of the shrunken values ``w_i * x_ij``.

    For fixed ``w`` this is the location minimising the relaxed objective.
    """
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    if X.ndim != 2 or w.shape != (X.shape[0],):
        raise DataError(
            f"dimension mismatch: X {X.shape} vs w {w.shape}"
        )
    return column_median(w[:, None] * X)


def l1_distances(X, m):
    return np.abs(np.asarray(X) - np.asarray(m)).sum(axis=1)


def ltad_objective(X, T, m):
    """Sum of L1 distances from the selected rows to ``m``."""
    X = as_data_matrix(X)
    T = as_selection(T, X.shape[0])
    return float(np.abs(X[T] - np.asarray(m, dtype=float)).sum())


def milp_objective(X, T, m):
    """Objective of the linearised program at integral weights.

    Unselected rows are shrunk to the origin, so each contributes ``|m|_1``.
    """
    X = as_data_matrix(X)
    n = X.shape[0]
    T = as_selection(T, n)
    m = np.asarray(m, dtype=float)
    return ltad_objective(X, T, m) + (n - T.size) * float(np.abs(m).sum())


def lp_objective_f(X, w):
    """Relaxed objective with the location profiled out."""
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    Z = w[:, None] * X
    m = np.median(Z, axis=0)
    return float(np.abs(Z - m).sum())


def lp_subgradient(X, w):
    """Subgradient of :func:`lp_objective_f`; ``sign(0)`` is taken as 0."""
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    Z = w[:, None] * X
    m = np.median(Z, axis=0)
    return (X * np.sign(Z - m)).sum(axis=1)


def lp_objective_min_over_halves(X, w):
    # Only defined for even n: sum(z) - 2 * (sum of the n/2 smallest z), per column.
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n % 2:
        raise DataError("half-sample identity requires even n")
    Z = np.sort(np.asarray(w, dtype=float)[:, None] * X, axis=0)
    return float((Z.sum(axis=0) - 2 * Z[: n // 2].sum(axis=0)).sum())


def mad_scale(X):
    """Per-column median absolute deviation; zero-MAD columns get scale 1."""
    X = as_data_matrix(X)
    mad = np.median(np.abs(X - np.median(X, axis=0)), axis=0)
    return np.where(mad > 0, mad, 1.0)


@dataclass
class LocationEstimate:
    """Location estimate with its provenance.

    ``m`` is the reported location. ``shift_location`` is the cumulative
    recentering translation plus the last relaxed location, which is what the
    relaxation itself estimates. When ``refit`` is set, ``m`` is the
    coordinate-wise median of the selected rows instead.
    """

    m: np.ndarray
    cumulative_shift: np.ndarray
    shift_location: np.ndarray
    refit: bool
    objective: float


@dataclass
class EstimationResult:
    estimate: LocationEstimate
    selection: np.ndarray
    weights: np.ndarray
    integrality_gap: float
    outer_iterations: int
    converged: bool
    h: int
    method: str = "lp"
    final_m_norm: float = 0.0
    m_tolerance: float = 0.0
    history: list = field(default_factory=list)
    inner_iterations: int = 0
