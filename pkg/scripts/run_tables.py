"""Regenerate every simulation table into a directory of CSV files."""

import argparse
import time

from trimmed_l1.simulation import TABLE_GROUPS, paper_table_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="tables")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replications", type=int, default=100)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--groups", nargs="*", choices=sorted(TABLE_GROUPS), default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    paths = paper_table_suite(args.out_dir, seed=args.seed, replications=args.replications,
                              workers=args.workers, groups=args.groups)
    for p in paths:
        print(p)
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
