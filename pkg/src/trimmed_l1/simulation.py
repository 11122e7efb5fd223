"""Seeded contamination scenarios and the MSE comparison across estimators.

Every replication draws from its own Philox stream keyed by
``(seed, replication_index)``, so replications can run in any order or in
parallel and still give identical data.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import DataError
from .driver import DriverConfig, estimate_ltad, heuristic_ltad
from .oracle import SIZE_GUARD, oracle_minlp

CONTAMINATION_KINDS = ("none", "strong", "intermediate")
# (mean shift on every coordinate, per-coordinate variance)
OUTLIER_LAWS = {"strong": (3.3, 0.3**2), "intermediate": (0.75, 0.5)}
ESTIMATORS = ("lp-ltad", "lp-ltad-refit", "heuristic", "oracle", "mean", "median")


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    p: int
    contamination_fraction: float = 0.0
    contamination_kind: str = "strong"
    correlation_rho: float = 0.0
    coverage_fraction: float = 0.5
    replications: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1 or self.replications < 1:
            raise DataError("n, p and replications must be positive")
        if not 0.0 <= self.contamination_fraction < 1.0:
            raise DataError("contamination_fraction must lie in [0, 1)")
        if self.contamination_kind not in CONTAMINATION_KINDS:
            raise DataError(f"unknown contamination kind {self.contamination_kind!r}")
        if not 0.0 <= self.correlation_rho < 1.0:
            raise DataError("correlation_rho must lie in [0, 1)")
        if self.n_contaminated + 1 > self.n:
            raise DataError("contamination leaves no clean rows")
        resolve_coverage(self.coverage_fraction, self.n)

    @property
    def n_contaminated(self):
        if self.contamination_kind == "none":
            return 0
        return math.ceil(round(self.contamination_fraction * self.n, 9))

    @property
    def h(self):
        return resolve_coverage(self.coverage_fraction, self.n)


def resolve_coverage(fraction, n):
    """``round(fraction * n)`` clamped to ``[1, n]``; half-way rounds up."""
    if not 0.0 < fraction <= 1.0:
        raise DataError(f"coverage fraction {fraction} outside (0, 1]")
    return int(min(n, max(1, math.floor(fraction * n + 0.5))))


def covariance(p, rho):
    return np.full((p, p), rho) + (1.0 - rho) * np.eye(p)


def replication_rng(seed, replication_index):
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(replication_index)])
    return np.random.Generator(np.random.Philox(ss))


def generate_dataset(spec, replication_index, return_labels=False):
    """Clean ``N_p(0, Sigma)`` sample with the first rows replaced by outliers."""
    try:
        L = np.linalg.cholesky(covariance(spec.p, spec.correlation_rho))
    except np.linalg.LinAlgError:
        raise DataError("covariance matrix is not positive definite") from None
    rng = replication_rng(spec.seed, replication_index)
    X = rng.standard_normal((spec.n, spec.p)) @ L.T
    k = spec.n_contaminated
    if k:
        shift, var = OUTLIER_LAWS[spec.contamination_kind]
        X[:k] = shift + np.sqrt(var) * rng.standard_normal((k, spec.p))
    if return_labels:
        labels = np.zeros(spec.n, dtype=bool)
        labels[:k] = True
        return X, labels
    return X


def parse_estimator(name, default_fraction):
    """Split ``"heuristic@0.5"`` into ``("heuristic", 0.5)``."""
    base, _, frac = name.partition("@")
    if base not in ESTIMATORS:
        raise DataError(f"unknown estimator {name!r}")
    return base, float(frac) if frac else default_fraction


def _oracle_fits(n, h):
    return math.comb(n, h) <= SIZE_GUARD


def _run_replication(spec, estimators, r, driver_cfg):
    X = generate_dataset(spec, r)
    out = {}
    for name in estimators:
        base, frac = parse_estimator(name, spec.coverage_fraction)
        h = resolve_coverage(frac, spec.n)
        if base in ("lp-ltad", "lp-ltad-refit"):
            res = estimate_ltad(X, h, driver_cfg)
            out[name] = res.estimate.shift_location if base == "lp-ltad" else res.estimate.m
        elif base == "heuristic":
            out[name] = heuristic_ltad(X, h, seed=[spec.seed, r]).estimate.m
        elif base == "oracle":
            out[name] = oracle_minlp(X, h).m
        elif base == "mean":
            out[name] = X.mean(axis=0)
        else:
            out[name] = np.median(X, axis=0)
    return out


def _run_chunk(args):
    spec, estimators, rs, driver_cfg = args
    return [_run_replication(spec, estimators, r, driver_cfg) for r in rs]


def worker_count(workers=None):
    if workers is None:
        workers = int(os.environ.get("TRIMMED_L1_THREADS", "1") or 1)
    return max(1, int(workers))


@dataclass
class MseReport:
    per_estimator: dict
    replications: int
    scenario: ScenarioSpec
    estimates: dict = field(default_factory=dict)
    mean_norm: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def recompute(self, name):
        est = self.estimates[name]
        return float(np.sum(est**2) / est.shape[0])

    def to_dict(self):
        return {
            "scenario": asdict(self.scenario),
            "replications": self.replications,
            "mse": self.per_estimator,
            "mean_norm": self.mean_norm,
            "skipped": self.skipped,
        }


def run_scenario(spec, estimators, workers=None, driver_cfg=DriverConfig()):
    """Run every estimator on every replication and collect ``mean |m|^2``."""
    estimators = list(estimators)
    skipped = {}
    for name in estimators:
        base, frac = parse_estimator(name, spec.coverage_fraction)
        h = resolve_coverage(frac, spec.n)
        if base == "oracle" and not _oracle_fits(spec.n, h):
            skipped[name] = f"oracle size guard: C({spec.n},{h}) > {SIZE_GUARD}"
    active = [e for e in estimators if e not in skipped]

    reps = list(range(spec.replications))
    workers = min(worker_count(workers), len(reps))
    if workers > 1:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(spec, active, c, driver_cfg) for c in chunks]))
        results = [None] * len(reps)
        for c, part in zip(chunks, parts):
            for r, res in zip(c, part):
                results[r] = res
    else:
        results = _run_chunk((spec, active, reps, driver_cfg))

    report = MseReport({}, spec.replications, spec, skipped=skipped)
    for name in active:
        est = np.array([res[name] for res in results])
        report.estimates[name] = est
        report.per_estimator[name] = float(np.sum(est**2) / est.shape[0])
        report.mean_norm[name] = float(np.linalg.norm(est, axis=1).mean())
    return report


# -- table grid --------------------------------------------------------------

_EPS = (0.0, 0.2, 0.4)
_BASELINES = ("heuristic@0.5", "mean")


def _grid(n, ps, estimators, kind="strong", rho=0.0, eps=_EPS):
    return [
        dict(n=n, p=p, contamination_fraction=e, contamination_kind=kind if e else "none",
             correlation_rho=rho, estimators=list(estimators))
        for p in ps for e in eps
    ]


TABLE_GROUPS = {
    "table1_efficiency": [
        dict(n=100, p=1, contamination_fraction=0.0, contamination_kind="none",
             correlation_rho=0.0, estimators=[f"lp-ltad@{c}" for c in (0.5, 0.6, 0.7, 0.8)]
             + [f"heuristic@{c}" for c in (0.5, 0.6, 0.7, 0.8)])
    ],
    "table2_3_strong_n50": _grid(50, (1, 2, 3), ("lp-ltad@0.5", "lp-ltad@0.2") + _BASELINES),
    "table7_strong_n100": _grid(100, (1, 3, 5), ("lp-ltad@0.2",) + _BASELINES),
    "table4_5_correlated_n50": _grid(50, (2, 3), ("lp-ltad@0.5", "lp-ltad@0.2") + _BASELINES, rho=0.7),
    "table8_correlated_n100": _grid(100, (3, 5), ("lp-ltad@0.2",) + _BASELINES, rho=0.7),
    "table6_intermediate_n50": _grid(50, (1, 2, 3), ("lp-ltad@0.2",) + _BASELINES, kind="intermediate"),
    "table9_intermediate_n100": _grid(100, (1, 3, 5), ("lp-ltad@0.2",) + _BASELINES, kind="intermediate"),
    "table10_11_strong_n500": _grid(500, (10, 20), ("lp-ltad@0.2",) + _BASELINES),
}

CSV_COLUMNS = ("p", "epsilon", "estimator", "MSE", "mean_norm")


def _fmt(x):
    return f"{x:.6g}"


def write_table(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)


def paper_table_suite(output_dir, seed=0, replications=100, workers=None, groups=None):
    """Run the table grid and write one CSV per group plus ``manifest.json``.

    Returns the list of written paths.
    """
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    names = list(TABLE_GROUPS) if groups is None else list(groups)

    written = []
    for name in names:
        rows = []
        for cell in TABLE_GROUPS[name]:
            cell = dict(cell)
            estimators = cell.pop("estimators")
            spec = ScenarioSpec(replications=replications, seed=seed, **cell)
            report = run_scenario(spec, estimators, workers=workers)
            for est in estimators:
                if est in report.skipped:
                    continue
                rows.append((spec.p, _fmt(spec.contamination_fraction), est,
                             _fmt(report.per_estimator[est]), _fmt(report.mean_norm[est])))
        path = out / f"{name}.csv"
        try:
            write_table(path, rows)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)

    manifest = {
        "seed": seed,
        "replications": replications,
        "spec_grid": {name: TABLE_GROUPS[name] for name in names},
        "driver_config": asdict(DriverConfig()),
        "versions": {"numpy": np.__version__},
        "timestamp_omitted_for_determinism": True,
    }
    mpath = out / "manifest.json"
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(mpath)
    return written

