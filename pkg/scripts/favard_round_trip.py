"""Extract a recurrence, rebuild the basis from it alone, and recover the weights.

Usage: python3 scripts/favard_round_trip.py [--seed N] [--random-weights]
"""

import argparse
import random
import time
from fractions import Fraction

from dopoly.orthogonalize import MomentFunctional, WeightFn, check_orthogonality, construct_orthogonal
from dopoly.recurrence import compute_recurrence, favard_reconstruct, recover_measure
from dopoly.staircase import PointSet, compute_staircase

POINTS = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (-1, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random-weights", action="store_true", help="seeded positive rational weights instead of uniform")
    args = ap.parse_args()

    V = PointSet.of(POINTS)
    if args.random_weights:
        rng = random.Random(args.seed)
        W = WeightFn(tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in V.points))
    else:
        W = WeightFn.uniform(len(V))
    L = MomentFunctional(V, W)

    start = time.perf_counter()
    basis = construct_orthogonal(L, compute_staircase(V))
    rec = compute_recurrence(basis)
    blocks = favard_reconstruct(rec, basis.staircase, reference=V)
    Vr, Wr = recover_measure(blocks, V, seed=args.seed)
    elapsed = time.perf_counter() - start

    scale = Wr.values[0] / W.values[0]
    print(f"{'point':>12}  {'original':>10}  {'recovered / scale':>18}")
    lookup = dict(zip(Vr.points, Wr.values))
    for p, w in zip(V.points, W.values):
        print(f"{str(tuple(int(c) for c in p)):>12}  {str(w):>10}  {str(lookup[p] / scale):>18}")
    ok = check_orthogonality(blocks, MomentFunctional(Vr, Wr)).passed
    print(f"global scale {scale}, reconstructed blocks orthogonal: {ok}, elapsed {elapsed:.3f}s")


if __name__ == "__main__":
    main()
