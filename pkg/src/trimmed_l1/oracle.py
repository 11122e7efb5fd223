"""Exhaustive solvers over all h-subsets, for small instances."""

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np

from .core import (
    OracleSizeError,
    as_data_matrix,
    check_coverage,
    ltad_objective,
    milp_objective,
)

SIZE_GUARD = 2_000_000
_CHUNK = 20_000


@dataclass
class OracleResult:
    selection: np.ndarray
    m: np.ndarray
    objective: float
    model: str


def check_size(n, h, guard=SIZE_GUARD):
    count = comb(n, h)
    if count > guard:
        raise OracleSizeError(
            f"oracle size guard: C({n},{h}) = {count} subsets exceeds {guard}"
        )
    return count


def _search(X, h, model):
    n, p = X.shape
    check_size(n, h)
    pad = n - h if model == "MILP" else 0
    best_obj, best_T, best_m = np.inf, None, None
    subsets = combinations(range(n), h)
    while True:
        block = np.array(list(islice(subsets, _CHUNK)), dtype=np.intp)
        if block.size == 0:
            break
        block = block.reshape(-1, h)
        rows = X[block]  # (k, h, p)
        if pad:
            rows_m = np.concatenate([rows, np.zeros((rows.shape[0], pad, p))], axis=1)
        else:
            rows_m = rows
        m = np.median(rows_m, axis=1)
        obj = np.abs(rows - m[:, None, :]).sum(axis=(1, 2))
        if pad:
            obj = obj + pad * np.abs(m).sum(axis=1)
        i = int(np.argmin(obj))
        # Strict improvement keeps the lexicographically first optimum.
        if obj[i] < best_obj:
            best_obj, best_T, best_m = obj[i], block[i].copy(), m[i].copy()
    return best_T, best_m


def oracle_minlp(X, h):
    """Global optimum of the trimmed L1 problem by enumeration.

    For a fixed subset the optimal location is the coordinate-wise median.
    """
    X = as_data_matrix(X)
    h = check_coverage(h, X.shape[0])
    T, m = _search(X, h, "MINLP")
    return OracleResult(T, m, ltad_objective(X, T, m), "MINLP")


def oracle_milp(X, h):
    """Global optimum of the linearised program over integral weights.

    Unselected rows count as zeros, so the per-column optimum is the median of
    the selected values padded with ``n - h`` zeros.
    """
    X = as_data_matrix(X)
    h = check_coverage(h, X.shape[0])
    T, m = _search(X, h, "MILP")
    return OracleResult(T, m, milp_objective(X, T, m), "MILP")
