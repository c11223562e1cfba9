#!/usr/bin/env python3
"""Compare the exact monodromy eigenvalue predictions with contour
integration over a (m, beta) grid and print the deviations.

Example:
    python scripts/monodromy_grid.py --m 2 3 --beta-min -3 --beta-max 6
"""

import argparse
from fractions import Fraction

from segreode import monodromy_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[2])
    ap.add_argument("--beta-min", type=int, default=-3)
    ap.add_argument("--beta-max", type=int, default=6)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args()

    header = f"{'m':>3} {'beta':>6}  {'trivial':>8}  {'lambda':>24}  " \
             f"{'deviation':>10}  {'det dev':>10}"
    print(header)
    print("-" * len(header))
    worst = 0.0
    for m in args.m:
        for beta in range(args.beta_min, args.beta_max + 1):
            rep = monodromy_report(m, Fraction(beta), numeric=True,
                                   radius=args.radius, tol=args.tol)
            lam = ", ".join(f"{l.real:.3g}{l.imag:+.3g}i"
                            for l in rep.residue_eigenvalues)
            dev = rep.numeric.deviation
            worst = max(worst, dev)
            print(f"{m:>3} {beta:>6}  {str(rep.trivial):>8}  {lam:>24}  "
                  f"{dev:10.2e}  {rep.numeric.det_deviation:10.2e}")
    print(f"\nworst eigenvalue deviation: {worst:.2e}")
    return 0 if worst < 1e-6 else 1


if __name__ == "__main__":
    raise SystemExit(main())
