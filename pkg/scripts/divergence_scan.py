#!/usr/bin/env python3
"""Scan a beta grid for one order m: monodromy triviality, recursion
termination, and the Gevrey order of the power-series solution half.

Example:
    python scripts/divergence_scan.py --m 2 --beta-max 12 --order 200
"""

import argparse
from fractions import Fraction

from segreode import (
    expected_termination,
    formal_solutions,
    gevrey_estimate,
    residue_analysis,
    termination_detect,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--beta-min", type=int, default=0)
    ap.add_argument("--beta-max", type=int, default=12)
    ap.add_argument("--order", type=int, default=200,
                    help="series order for the growth fit")
    args = ap.parse_args()

    header = f"{'beta':>6}  {'monodromy':>10}  {'terminates':>10}  " \
             f"{'degree':>6}  {'gevrey':>8}  {'radius':>10}"
    print(header)
    print("-" * len(header))
    for beta in range(args.beta_min, args.beta_max + 1):
        mono = residue_analysis(args.m, Fraction(beta))
        pair = formal_solutions(args.m, Fraction(beta), args.order)
        term = termination_detect(pair.f)
        assert term.terminated == expected_termination(args.m, beta)
        if term.terminated:
            growth_str = f"{'-':>8}  {'inf':>10}"
            degree = "-" if term.degree is None else term.degree
        else:
            report = gevrey_estimate(pair.f)
            growth_str = f"{report.gevrey:8.3f}  {report.radius:10.3e}"
            degree = "-"
        print(f"{beta:>6}  {'trivial' if mono.trivial else 'nontrivial':>10}  "
              f"{str(term.terminated):>10}  {str(degree):>6}  {growth_str}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
