"""Build the orthogonal basis on the eight-point stair set and print it.

Usage: python3 scripts/stair_set_golden.py [--order grevlex|grlex]
"""

import argparse
import time

from dopoly.orthogonalize import MomentFunctional, construct_orthogonal
from dopoly.recurrence import commute_check, compute_recurrence, jacobi_operators, rank_condition, verify_three_term
from dopoly.staircase import MonomialOrder, PointSet, compute_staircase

POINTS = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (-1, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", default="grevlex", choices=["grevlex", "grlex"])
    args = ap.parse_args()

    start = time.perf_counter()
    L = MomentFunctional.uniform(PointSet.of(POINTS))
    lam = compute_staircase(L.V, MonomialOrder(args.order))
    basis = construct_orthogonal(L, lam)
    rec = compute_recurrence(basis)
    elapsed = time.perf_counter() - start

    print(f"staircase: {list(lam.indices)}")
    print(f"block sizes: {basis.sizes}")
    for k, block in enumerate(basis.blocks):
        for j, p in enumerate(block):
            print(f"  P[{k}][{j}] = {p}")
    tt = verify_three_term(rec, basis, L.V)
    print(f"three-term: {tt.checked} residuals, max {tt.max_residual}")
    print(f"rank condition: {[row['passed'] for row in rank_condition(rec)]}")
    print(f"commutator max entry: {commute_check(jacobi_operators(rec)).max_entry}")
    print(f"elapsed {elapsed:.3f}s")


if __name__ == "__main__":
    main()
