"""Where the hybrid-product residual |zeta / (P_X Z_X) - 1| comes from.

With the zero sum taken over all zeros, log zeta - log P_X - log Z_X is
exactly sum_{n <= X} (w(n) - 1) Lambda(n) / (n^s log n) plus terms that are
negligible for large t, where w(n) is the mass of f above
u0 = X log n / log X - X + 1.  The right side does not depend on the size
of t, only on the phases n^{-it}, so the median residual levels off at a
constant set by the prime powers just below X.

    python3 scripts/hybrid_residual.py --x 30
"""

import argparse
import math

import numpy as np

from zetamoments.hybrid import HybridContext, _prime_power_terms, hybrid_residual, log_p_x, log_z_x
from zetamoments.special_fn import default_kernel
from zetamoments.zeta_engine import find_zeros, zeta


def smoothed_weights(X, f):
    n, wt = _prime_power_terms(X)
    u = np.linspace(0.0, 1.0, 200_001)
    fu = f(u)
    total = np.trapezoid(fu, u)
    w = []
    for m in n:
        u0 = X * math.log(m) / math.log(X) - X + 1
        w.append(1.0 if u0 <= 0 else np.trapezoid(fu[u >= u0], u[u >= u0]) / total)
    return n, wt, np.array(w)


def midpoints(zeros, lo, hi, count):
    g = zeros.between(lo, hi)
    i = np.linspace(0, g.size - 2, count).round().astype(int)
    return 0.5 + 0.5j * (g[i] + g[i + 1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, default=30.0)
    ap.add_argument("--points", type=int, default=50)
    args = ap.parse_args()

    ranges = [(400, 600), (1000, 1500), (2000, 3000), (4000, 6000)]
    ctx = HybridContext(args.x, find_zeros(ranges[-1][1] + 1.2 * 48 * args.x / math.log(args.x)))
    n, wt, w = smoothed_weights(args.x, default_kernel())
    print(f"X = {args.x:g}, window half-width {ctx.half_width:.1f} in t")
    print("prime powers with w(n) < 1:", ", ".join(f"{int(m)} ({x:.3f})" for m, x in zip(n, w) if x < 1))
    print(f"{'t range':>14} {'median residual':>16} {'median predicted':>17} {'max |log gap|':>14}")
    for lo, hi in ranges:
        s = midpoints(ctx.zeros, lo, hi, args.points)
        res = hybrid_residual(s, ctx)
        gap = np.log(zeta(s)) - log_p_x(s, ctx) - log_z_x(s, ctx)
        corr = np.exp(-np.outer(s, np.log(n))) @ ((w - 1) * wt)
        pred = np.abs(np.exp(corr) - 1)
        d = np.angle(np.exp(gap - corr))
        err = np.max(np.hypot((gap - corr).real, d))
        print(f"{f'[{lo}, {hi}]':>14} {np.median(res):16.4f} {np.median(pred):17.4f} {err:14.1e}")


if __name__ == "__main__":
    main()
