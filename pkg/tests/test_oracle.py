import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_ltad
from trimmed_l1.core import OracleSizeError, ltad_objective, milp_objective
from trimmed_l1.oracle import check_size, oracle_milp, oracle_minlp
from trimmed_l1.univariate import solve_univariate

X4 = np.array([0.0, 1.0, 2.0, 10.0])[:, None]


def test_minlp_example():
    res = oracle_minlp(X4, 3)
    assert list(res.selection) == [0, 1, 2]
    assert res.m[0] == 1.0 and res.objective == 2.0 and res.model == "MINLP"


def test_milp_example():
    res = oracle_milp(X4, 3)
    assert list(res.selection) == [0, 1, 2]
    assert res.m[0] == 0.5 and res.objective == 3.0


def test_milp_prefers_points_near_origin():
    X = np.array([[5.0, 5.0], [5.1, 5.0], [0.2, 0.1], [-0.3, 0.4]])
    assert list(oracle_milp(X, 2).selection) == [2, 3]
    assert list(oracle_minlp(X, 2).selection) == [0, 1]


def test_size_guard():
    assert check_size(20, 10) == math.comb(20, 10)
    with pytest.raises(OracleSizeError, match="oracle size guard"):
        oracle_minlp(np.zeros((40, 1)), 20)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_univariate_agreement(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 11))
    h = int(rng.integers(math.ceil(n / 2), n + 1))
    x = rng.standard_normal(n)
    _, _, obj = solve_univariate(x, h)
    assert oracle_minlp(x, h).objective == pytest.approx(obj, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracles_against_brute_force_and_each_other(seed):
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(2, 9)), int(rng.integers(1, 4))
    h = int(rng.integers(1, n + 1))
    X = rng.standard_normal((n, p)) + rng.normal(0, 2, p)
    mi, ml = oracle_minlp(X, h), oracle_milp(X, h)
    assert mi.objective == pytest.approx(brute_force_ltad(X, h), rel=1e-12, abs=1e-12)
    # MILP optimum costs at least the MINLP optimum, and its subset is feasible for MINLP
    assert ml.objective >= mi.objective - 1e-12
    assert ltad_objective(X, ml.selection, np.median(X[ml.selection], axis=0)) >= mi.objective - 1e-12
    assert milp_objective(X, ml.selection, ml.m) == pytest.approx(ml.objective)
    if h == n:
        assert ml.objective == pytest.approx(mi.objective)
