"""Command-line front end.

Results go to stdout, diagnostics to stderr. Exit status is 0 on success,
2 on bad input and 3 when the exhaustive oracle refuses an instance.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import fields, replace

import numpy as np

from .core import DataError, OracleSizeError
from .data_io import ingest_csv
from .driver import DriverConfig, check_lemma1, estimate_ltad, heuristic_ltad
from .oracle import check_size, oracle_minlp
from .simulation import ScenarioSpec, paper_table_suite, resolve_coverage, run_scenario
from .subgradient import SolverConfig

EXIT_INPUT = 2
EXIT_SIZE_GUARD = 3

log = logging.getLogger("trimmed_l1")


def resolve_h(h_spec, n):
    """An integer string is a count; anything else is a fraction of ``n``."""
    text = str(h_spec).strip()
    try:
        count = int(text)
    except ValueError:
        try:
            frac = float(text)
        except ValueError:
            raise DataError(f"cannot parse coverage {h_spec!r}") from None
        return resolve_coverage(frac, n)
    if not 1 <= count <= n:
        raise DataError(f"invalid coverage h={count} for n={n}")
    return count


def _coerce(value, default):
    if isinstance(default, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise DataError(f"not a boolean: {value!r}")
    try:
        return type(default)(value)
    except ValueError:
        raise DataError(f"cannot convert {value!r} to {type(default).__name__}") from None


def build_config(overrides, standardize=False):
    """Apply ``key=value`` overrides onto the solver and driver configs."""
    solver, driver = SolverConfig(), DriverConfig()
    solver_keys = {f.name for f in fields(SolverConfig)}
    driver_keys = {f.name for f in fields(DriverConfig)} - {"solver"}
    s_over, d_over = {}, {}
    for item in overrides or []:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise DataError(f"override must be key=value, got {item!r}")
        if key in solver_keys:
            s_over[key] = _coerce(value.strip(), getattr(solver, key))
        elif key in driver_keys:
            d_over[key] = _coerce(value.strip(), getattr(driver, key))
        else:
            raise DataError(f"unknown config key {key!r}")
    if standardize:
        d_over["standardize"] = True
    try:
        return replace(driver, solver=replace(solver, **s_over), **d_over)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _vec(v):
    return [float(x) for x in np.atleast_1d(v)]


def _emit(payload, fmt, out):
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["field", "value"])
    for key, value in payload.items():
        if isinstance(value, list):
            for i, v in enumerate(value, start=1):
                writer.writerow([f"{key}_{i}", repr(v) if isinstance(v, float) else v])
        elif isinstance(value, dict):
            for k, v in value.items():
                writer.writerow([f"{key}.{k}", repr(v) if isinstance(v, float) else v])
        else:
            writer.writerow([key, repr(value) if isinstance(value, float) else value])


def run_estimate(args, out=sys.stdout):
    X = ingest_csv(args.input)
    n = X.shape[0]
    h = resolve_h(args.h, n)
    cfg = build_config(args.set, args.standardize)
    if args.method == "oracle":
        check_size(n, h)
        res = oracle_minlp(X, h)
        payload = {
            "method": "oracle", "h": h, "m": _vec(res.m), "m_shift": _vec(res.m),
            "selection": [int(i) + 1 for i in res.selection], "objective": res.objective,
            "converged": True, "integrality_gap": 0.0, "iterations": 0,
        }
    else:
        if args.method == "heuristic":
            res = heuristic_ltad(X, h, seed=args.seed)
        else:
            res = estimate_ltad(X, h, cfg)
        payload = {
            "method": args.method, "h": h, "m": _vec(res.estimate.m),
            "m_shift": _vec(res.estimate.shift_location),
            "selection": [int(i) + 1 for i in res.selection],
            "objective": res.estimate.objective, "converged": res.converged,
            "integrality_gap": res.integrality_gap, "iterations": res.outer_iterations,
        }
    _emit(payload, args.format, out)
    return 0


def run_oracle_check(args, out=sys.stdout):
    X = ingest_csv(args.input)
    n = X.shape[0]
    h = resolve_h(args.h, n)
    check_size(n, h)
    cfg = build_config(args.set, args.standardize)
    oracle = oracle_minlp(X, h)
    res = estimate_ltad(X, h, cfg)
    ratio = res.estimate.objective / oracle.objective if oracle.objective > 0 else (
        1.0 if res.estimate.objective == 0 else float("inf"))
    payload = {
        "h": h,
        "oracle_objective": oracle.objective,
        "oracle_selection": [int(i) + 1 for i in oracle.selection],
        "lp_objective": res.estimate.objective,
        "lp_selection": [int(i) + 1 for i in res.selection],
        "ratio": ratio,
        "integrality_gap": res.integrality_gap,
        "lemma1_holds": check_lemma1(res, args.tol),
    }
    _emit(payload, args.format, out)
    return 0


def run_simulate(args, out=sys.stdout):
    spec = ScenarioSpec(
        n=args.n, p=args.p, contamination_fraction=args.epsilon,
        contamination_kind=args.kind, correlation_rho=args.rho,
        coverage_fraction=float(args.h), replications=args.replications, seed=args.seed,
    )
    cfg = build_config(args.set, args.standardize)
    estimators = [e.strip() for e in args.estimators.split(",") if e.strip()]
    report = run_scenario(spec, estimators, driver_cfg=cfg)
    if args.format == "json":
        out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["estimator", "MSE", "mean_norm"])
        for name, mse in report.per_estimator.items():
            writer.writerow([name, f"{mse:.6g}", f"{report.mean_norm[name]:.6g}"])
    for name, why in report.skipped.items():
        log.warning("skipped %s: %s", name, why)
    return 0


def run_tables(args, out=sys.stdout):
    try:
        paths = paper_table_suite(args.out_dir, seed=args.seed, replications=args.replications)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    for path in paths:
        out.write(f"{path}\n")
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="trimmed-l1", description="Trimmed L1 (LTAD) location estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="CSV file, one observation per row")
            p.add_argument("--h", default="0.5", help="coverage: count (e.g. 25) or fraction (e.g. 0.5)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
        p.add_argument("--standardize", action="store_true", help="scale columns by their MAD")

    p = sub.add_parser("estimate", help="location estimate for a data file")
    common(p)
    p.add_argument("--method", choices=("lp", "heuristic", "oracle"), default="lp")
    p.set_defaults(func=run_estimate)

    p = sub.add_parser("oracle-check", help="compare the LP estimate with exhaustive search")
    common(p)
    p.add_argument("--tol", type=float, default=1e-3, help="integrality tolerance")
    p.set_defaults(func=run_oracle_check)

    p = sub.add_parser("simulate", help="MSE of estimators on one contamination scenario")
    common(p, needs_input=False)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--kind", choices=("none", "strong", "intermediate"), default="strong")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--h", default="0.5", help="coverage fraction")
    p.add_argument("--replications", type=int, default=100)
    p.add_argument("--estimators", default="lp-ltad,heuristic@0.5,mean")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("tables", help="run the full simulation grid, one CSV per table")
    p.add_argument("--out-dir", default="tables")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=100)
    p.set_defaults(func=run_tables)
    return parser


def main(argv=None, out=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = make_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except OracleSizeError as exc:
        log.error("%s", exc)
        return EXIT_SIZE_GUARD
    except (DataError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
