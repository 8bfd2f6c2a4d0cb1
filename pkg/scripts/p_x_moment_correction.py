"""Mean of |P_X(rho)|^{2k} over zeros against its diagonal and off-diagonal parts.

Averaging |sum alpha_k(n) n^{-rho}|^2 over zeros up to T gives the diagonal
sum alpha_k(n)^2 / n (the mean-value limit) minus a Landau-Gonek term
(T / pi N(T)) sum_{m, q} alpha_k(m) alpha_k(mq) Lambda(q) / (mq).  At
T = 5000 the second piece is of the same size as the first, which is why the
empirical moment is far from a_k (e^gamma log X)^{k^2} at desk scale.

    python3 scripts/p_x_moment_correction.py --t 5000 --x 20
"""

import argparse
import math

import numpy as np

from zetamoments import arith
from zetamoments.harness import predict_p_x_moment
from zetamoments.hybrid import HybridContext, p_x
from zetamoments.zeta_engine import find_zeros, von_mangoldt_real


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, default=5000.0)
    ap.add_argument("--x", type=float, default=20.0)
    ap.add_argument("--k", default="1,-1")
    ap.add_argument("--cutoff", type=int, default=10**6)
    args = ap.parse_args()

    zeros = find_zeros(args.t)
    g = zeros.upto(args.t)
    ctx = HybridContext(args.x, zeros)
    nn = np.arange(args.cutoff + 1, dtype=float)
    print(f"T = {args.t:g}, X = {args.x:g}, {g.size} zeros")
    for k in (float(v) for v in args.k.split(",")):
        emp = float(np.mean(np.abs(p_x(0.5 + 1j * g, ctx)) ** (2 * k)))
        a = arith.build_alpha(k, args.x, args.cutoff).values
        diag = float(np.sum(a[1:] ** 2 / nn[1:]))
        off = 0.0
        for q in range(2, 10**4 + 1):
            lam = von_mangoldt_real(q)
            if lam == 0:
                continue
            m = np.arange(1, args.cutoff // q + 1)
            off += lam / q * float(np.sum(a[m] * a[m * q] / m))
        two_term = diag - args.t / math.pi * off / g.size
        print(f"k = {k:+g}: empirical {emp:.5g}, leading {predict_p_x_moment(k, args.x):.5g}, "
              f"diagonal {diag:.5g}, diagonal + Landau-Gonek {two_term:.5g} (empirical/that {emp / two_term:.4f})")


if __name__ == "__main__":
    main()
