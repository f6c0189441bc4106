"""Tabulate truncated Meixner norm sums against the closed form.

Usage: python3 scripts/meixner_convergence.py [--b 1] [--c 1/2] [--degree 4] [--truncation 200]
"""

import argparse
import math
from fractions import Fraction

from dopoly.families import MeixnerParams, meixner_crossover, meixner_norm, meixner_norm_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=Fraction, default=Fraction(1))
    ap.add_argument("--c", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--truncation", type=int, default=200)
    ap.add_argument("--checkpoints", default="25,50,100,150,200")
    args = ap.parse_args()

    p = MeixnerParams(args.b, args.c)
    cuts = [int(t) for t in args.checkpoints.split(",") if int(t) <= args.truncation]
    print(f"{'m':>2} {'n':>2} {'cross':>5}  " + "  ".join(f"T={t:<8}" for t in cuts))
    for m in range(args.degree + 1):
        for n in range(m, args.degree + 1):
            scale = math.sqrt(meixner_norm(m, p) * meixner_norm(n, p))
            gaps = [meixner_norm_check(m, n, p, t).gap / scale for t in cuts]
            cross = meixner_crossover(m, n, p, args.truncation)
            print(f"{m:>2} {n:>2} {cross:>5}  " + "  ".join(f"{g:<10.2e}" for g in gaps))


if __name__ == "__main__":
    main()
