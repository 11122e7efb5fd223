"""Exact univariate trimmed L1 location by scanning windows of sorted data."""

from dataclasses import dataclass

import numpy as np

from .core import DataError, check_coverage


@dataclass
class WindowSolution:
    start_rank: int
    m: float
    objective: float


def _prepare(x, h):
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise DataError("empty input")
    if not np.all(np.isfinite(x)):
        raise DataError("data contains non-finite entries")
    try:
        h = check_coverage(h, x.size)
    except DataError:
        raise DataError(f"invalid coverage h={h} for n={x.size}") from None
    order = np.argsort(x, kind="stable")
    return x, h, order, x[order]


def _window_scores(xs, h):
    # Sum of |x - median| over a sorted window = (top half sum) - (bottom half sum).
    n = xs.size
    half = h // 2
    csum = np.concatenate([[0.0], np.cumsum(xs)])
    starts = np.arange(n - h + 1)
    low = csum[starts + half] - csum[starts]
    high = csum[starts + h] - csum[starts + h - half]
    if h % 2:
        med = xs[starts + half]
    else:
        med = 0.5 * (xs[starts + half - 1] + xs[starts + half])
    return med, high - low


def enumerate_windows(x, h):
    """All ``n - h + 1`` contiguous windows of the sorted data."""
    _, h, _, xs = _prepare(x, h)
    med, _ = _window_scores(xs, h)
    out = []
    for s, m in enumerate(med):
        obj = float(np.abs(xs[s : s + h] - m).sum())
        out.append(WindowSolution(s, float(m), obj))
    return out


def solve_univariate(x, h):
    """Return ``(m, T, objective)`` for the best window; earliest window on ties."""
    x, h, order, xs = _prepare(x, h)
    med, score = _window_scores(xs, h)
    # Prefix sums can disagree with direct sums in the last ulp; rescore the
    # near-optimal windows directly before picking.
    near = np.flatnonzero(score <= score.min() * (1 + 1e-9) + 1e-12)
    direct = np.array([np.abs(xs[s : s + h] - med[s]).sum() for s in near])
    s = int(near[np.argmin(direct)])
    T = np.sort(order[s : s + h])
    m = float(med[s])
    return m, T, float(np.abs(x[T] - m).sum())
