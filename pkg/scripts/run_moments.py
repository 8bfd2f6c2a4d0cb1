"""Run every moment quantity over a (T, X, k) grid and write one CSV.

    python3 scripts/run_moments.py --t-grid 1000,2000,5000 --x 20 --out moments.csv
"""

import argparse
import sys
import time

from zetamoments.harness import QUANTITIES, ExperimentConfig, run_grid
from zetamoments.io_cli import ingest_zeros, write_reports
from zetamoments.zeta_engine import find_zeros


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-grid", default="1000,2000,5000")
    ap.add_argument("--x", type=float, default=20.0)
    ap.add_argument("--x-rule", type=float, default=None, help="X = (log T)^x_rule instead of a fixed X")
    ap.add_argument("--k", default="-1,-0.5,0.5,1,2")
    ap.add_argument("--zeros", help="zero file; computed when omitted")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        t_grid=tuple(float(t) for t in args.t_grid.split(",")),
        x_fixed=None if args.x_rule else args.x,
        x_exponent=args.x_rule,
        k_list=tuple(float(k) for k in args.k.split(",")),
        threads=args.threads,
    )
    t0 = time.perf_counter()
    zeros = ingest_zeros(args.zeros) if args.zeros else find_zeros(max(cfg.t_grid), cfg.zeta_config)
    print(f"{len(zeros)} zeros up to {zeros.t_max:g} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)

    reports = []
    for q in QUANTITIES:
        reports += run_grid(q, cfg, zeros)
        print(f"{q} done", file=sys.stderr)
    write_reports(reports, sys.stdout if args.out == "-" else args.out)


if __name__ == "__main__":
    main()
