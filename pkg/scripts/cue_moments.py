"""Exact CUE moments of |Z'(theta_n)| beside Monte Carlo estimates.

    python3 scripts/cue_moments.py --n 2,4,6,8 --k 0.5,1,-0.5 --samples 20000
"""

import argparse

from zetamoments.rmt import cue_moment_exact, cue_moment_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="2,4,6,8")
    ap.add_argument("--k", default="0.5,1,-0.5")
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    print(f"{'N':>4} {'k':>6} {'exact':>14} {'monte carlo':>14} {'std err':>10} {'z':>6}")
    for N in (int(v) for v in args.n.split(",")):
        for k in (float(v) for v in args.k.split(",")):
            ex = cue_moment_exact(N, k)
            mc = cue_moment_mc(N, k, args.samples, args.seed, args.threads)
            print(f"{N:4d} {k:6g} {ex:14.8g} {mc.mean:14.8g} {mc.std_error:10.2e} "
                  f"{(mc.mean - ex) / mc.std_error:+6.2f}")


if __name__ == "__main__":
    main()
