"""Acceptance suite.

Each test prints one ``[PASS]``/``[FAIL]`` line.  Criteria 1-8 and 10 are
exact (zero tolerance); the Meixner criterion compares truncated sums with
relative tolerance 1e-10 at T = 200.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from golden import GOLDEN_BLOCKS
from dopoly.exactlinalg import rank
from dopoly.families import (
    HahnParams,
    MeixnerParams,
    TriangleHahnParams,
    hahn,
    hahn_family,
    hahn_norm,
    hahn_recurrence,
    hahn_weight,
    meixner,
    meixner_crossover,
    meixner_norm,
    meixner_norm_check,
    meixner_partial_sums,
    pochhammer,
    product_basis,
    product_recurrence,
    span_equal,
    triangle_basis,
)
from dopoly.orthogonalize import MomentFunctional, WeightFn, check_orthogonality, construct_orthogonal
from dopoly.poly import Poly
from dopoly.recurrence import (
    christoffel_darboux,
    commute_check,
    compute_recurrence,
    favard_reconstruct,
    jacobi_operators,
    rank_condition,
    recover_measure,
    verify_three_term,
)
from dopoly.staircase import MonomialOrder, PointSet, compute_staircase, stair_grid

EIGHT = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (-1, 2)]
FOUR = [(0, 0), (0, 1), (1, 2), (2, 3)]
SEED = 20240607
MEIXNER_RTOL = 1e-10
MEIXNER_T = 200


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def _positive_weights(rng: random.Random, n: int) -> WeightFn:
    return WeightFn(tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)))


def _eight_case():
    V = PointSet.of(EIGHT)
    return "eight-point set", MomentFunctional.uniform(V)


def _grid_case():
    rng = random.Random(SEED)
    xs = sorted(rng.sample(range(-6, 7), 3))
    ys = sorted(rng.sample(range(-6, 7), 4))
    V, _ = stair_grid(xs, ys, [2, 2, 0, 0])
    return "stair grid (2,2,0,0)", MomentFunctional(V, _positive_weights(rng, len(V)))


def _random_cases(count: int = 20):
    rng = random.Random(SEED + 1)
    out = []
    for j in range(count):
        size = rng.randint(2, 10)
        pts = set()
        while len(pts) < size:
            pts.add((Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3))))
        V = PointSet(2, tuple(sorted(pts)))
        out.append((f"random set {j}", MomentFunctional(V, _positive_weights(rng, size))))
    return out


def _all_cases():
    return [_eight_case(), _grid_case(), *_random_cases()]


def _built(L):
    basis = construct_orthogonal(L, compute_staircase(L.V))
    return basis, compute_recurrence(basis)


def _proportional(p: Poly, q: Poly) -> bool:
    if set(p.terms) != set(q.terms):
        return False
    ratios = {Fraction(p.terms[a]) / Fraction(q.terms[a]) for a in p.terms}
    return len(ratios) == 1 and ratios.pop() > 0


def test_criterion_01_golden_eight_point_basis(report):
    start = time.perf_counter()
    L = MomentFunctional.uniform(PointSet.of(EIGHT))
    basis = construct_orthogonal(L, compute_staircase(L.V))
    elapsed = time.perf_counter() - start
    sizes_ok = basis.sizes == (1, 2, 3, 2)
    match = sizes_ok and all(
        len(got) == len(want) and all(_proportional(p, q) for p, q in zip(got, want))
        for got, want in zip(basis.blocks, GOLDEN_BLOCKS)
    )
    report(1, "eight-point basis equals the reference polynomials", match and elapsed < 1.0, f"sizes {basis.sizes}, {elapsed:.3f}s")


def test_criterion_02_four_point_staircases(report):
    start = time.perf_counter()
    V = PointSet.of(FOUR)
    rev = set(compute_staircase(V, MonomialOrder("grevlex")).indices)
    lex = set(compute_staircase(V, MonomialOrder("grlex")).indices)
    elapsed = time.perf_counter() - start
    ok = rev == {(0, 0), (1, 0), (0, 1), (2, 0)} and lex == {(0, 0), (1, 0), (0, 1), (0, 2)} and elapsed < 1.0
    report(2, "grevlex {1,x,y,x^2}, grlex {1,x,y,y^2}", ok, f"{elapsed:.3f}s")


def test_criterion_03_three_term_exact(report):
    bad = []
    checked = 0
    for name, L in _all_cases():
        basis, rec = _built(L)
        r = verify_three_term(rec, basis, L.V)
        checked += r.checked
        if not (r.passed and r.max_residual == 0):
            bad.append(name)
    report(3, "three-term residual is exactly zero", not bad, f"{checked} residuals, failures: {bad or 'none'}")


def _individual_ranks(rec, i):
    return [rank(rec.A[k][i]) for k in range(rec.top_degree)]


def test_criterion_04_rank_conditions(report):
    bad = []
    for name, L in _all_cases():
        _, rec = _built(L)
        for row in rank_condition(rec):
            if not (row["rank_A"] == row["r_next"] and row["rank_C"] == row["r_next"]):
                bad.append((name, row["degree"]))
    # product grid with n = 4 x-nodes beyond m = 2 y-nodes
    n, m = 4, 2
    fx = hahn_family(HahnParams(0, 0, n))
    fy = hahn_family(HahnParams(Fraction(1, 2), Fraction(3, 2), m))
    closed = product_recurrence(fx, fy)
    pb = product_basis(fx, fy)
    _, generic = _built(pb.functional)
    regimes_ok = True
    for rec in (closed, generic):
        r = rec.sizes
        for k in range(rec.top_degree):
            deficient = rank(rec.A[k][1]) < min(r[k], r[k + 1])
            regimes_ok &= deficient == (m <= k < n)
        regimes_ok &= all(row["passed"] for row in rank_condition(rec))
    ok = not bad and regimes_ok
    report(4, "composite ranks equal r_{k+1}; y-blocks deficient exactly for m <= k < n", ok, f"y-ranks {_individual_ranks(closed, 1)}")


def test_criterion_05_jacobi_commute(report):
    bad = []
    for name, L in _all_cases():
        _, rec = _built(L)
        c = commute_check(jacobi_operators(rec))
        if not (c.passed and c.max_entry == 0):
            bad.append(name)
    report(5, "Jacobi operators commute exactly", not bad, f"failures: {bad or 'none'}")


def test_criterion_06_christoffel_darboux(report):
    L = MomentFunctional.uniform(PointSet.of(EIGHT))
    basis, rec = _built(L)
    count, bad = 0, []
    for k, i in itertools.product(range(3), range(2)):
        for x, y in itertools.permutations(L.V.points, 2):
            if x[i] == y[i]:
                continue
            lhs, rhs = christoffel_darboux(basis, rec, x, y, i, k)
            count += 1
            if lhs != rhs:
                bad.append((k, i, x, y))
    report(6, "Christoffel-Darboux holds exactly", not bad and count > 0, f"{count} pairs")


def test_criterion_07_favard_round_trip(report):
    start = time.perf_counter()
    V = PointSet.of(EIGHT)
    L = MomentFunctional.uniform(V)
    basis, rec = _built(L)
    blocks = favard_reconstruct(rec, basis.staircase, reference=V)
    Vr, W = recover_measure(blocks, V)
    Lr = MomentFunctional(Vr, W)
    scale = W.values[0] / L.W.values[0]
    uniform = set(Vr.points) == set(V.points) and all(w == scale * L.W.values[0] for w in W.values)
    spans = all(span_equal(a, b, basis.staircase.indices) for a, b in zip(blocks, basis.blocks))
    rebuilt = construct_orthogonal(Lr, compute_staircase(Vr))
    rrec = compute_recurrence(rebuilt)
    verified = (
        check_orthogonality(blocks, Lr).passed
        and verify_three_term(rrec, rebuilt, Vr).passed
        and all(row["passed"] for row in rank_condition(rrec))
        and commute_check(jacobi_operators(rrec)).passed
    )
    elapsed = time.perf_counter() - start
    ok = uniform and spans and verified and elapsed < 5.0
    report(7, "Favard round trip recovers uniform weights", ok, f"scale {scale}, {elapsed:.3f}s")


def _hahn_sum(m: int, n: int, p: HahnParams) -> Fraction:
    Qm, Qn = hahn(m, p), hahn(n, p)
    return sum((hahn_weight(x, p) * Qm((x,)) * Qn((x,)) for x in range(p.N + 1)), Fraction(0))


def _closed_norm(n: int, p: HahnParams) -> Fraction:
    a, b, N = p.a, p.b, p.N
    return (
        Fraction((-1) ** n) * pochhammer(n + a + b + 1, N + 1) * pochhammer(b + 1, n) * math.factorial(n)
        / ((2 * n + a + b + 1) * pochhammer(a + 1, n) * pochhammer(-N, n) * math.factorial(N))
    )


def test_criterion_08_hahn_norms(report):
    X = Poly.monomial((1,))
    bad = []
    for (a, b), N in itertools.product([(0, 0), (Fraction(1, 2), Fraction(3, 2))], (3, 5)):
        p = HahnParams(a, b, N)
        for m, n in itertools.product(range(N + 1), repeat=2):
            s = _hahn_sum(m, n, p)
            want = _closed_norm(n, p) if m == n else 0
            if s != want or (m == n and hahn_norm(n, p) != want):
                bad.append(("norm", a, b, N, m, n))
        for n in range(N):
            A, C = hahn_recurrence(n, p)
            rhs = hahn(n + 1, p) * A - hahn(n, p) * (A + C) + (hahn(n - 1, p) * C if n else 0)
            if -X * hahn(n, p) != rhs:
                bad.append(("recurrence", a, b, N, n))
    report(8, "Hahn sums match the closed-form norms; recurrence holds coefficient-wise", not bad, f"failures: {bad or 'none'}")


def test_criterion_09_meixner_convergence(report):
    p = MeixnerParams(1, Fraction(1, 2))
    worst = 0.0
    monotone = True
    for m, n in itertools.product(range(5), repeat=2):
        check = meixner_norm_check(m, n, p, MEIXNER_T)
        scale = math.sqrt(meixner_norm(m, p) * meixner_norm(n, p))
        worst = max(worst, check.gap / scale)
        # (1-c)^b is rational for integer b, so the target and gaps are exact
        target = Fraction(math.factorial(n)) / (p.c**n * pochhammer(p.b, n) * (1 - p.c) ** int(p.b)) if m == n else Fraction(0)
        gaps = [abs(s - target) for s in meixner_partial_sums(m, n, p, MEIXNER_T)]
        start = meixner_crossover(m, n, p, MEIXNER_T)
        monotone &= all(g1 <= g0 for g0, g1 in zip(gaps[start:], gaps[start + 1 :]))
        monotone &= gaps[-1] < gaps[start] or gaps[start] == 0
    ok = worst < MEIXNER_RTOL and monotone
    report(9, "Meixner sums within 1e-10 relative by T=200, monotone after crossover", ok, f"worst relative gap {worst:.2e}")


def test_criterion_10_cross_validation(report):
    fx = hahn_family(HahnParams(0, 0, 3))
    fy = hahn_family(HahnParams(Fraction(1, 2), Fraction(3, 2), 3))
    cases = [
        ("product Hahn N=M=3", product_basis(fx, fy)),
        ("triangle Hahn N=2", triangle_basis(TriangleHahnParams(0, 0, 0, 2))),
        ("triangle Hahn N=2, mixed parameters", triangle_basis(TriangleHahnParams(Fraction(1, 2), 1, 0, 2))),
    ]
    bad = []
    for name, closed in cases:
        L = closed.functional
        built = construct_orthogonal(L, compute_staircase(L.V))
        if built.sizes != closed.sizes:
            bad.append(name)
            continue
        if not all(span_equal(a, b, built.staircase.indices) for a, b in zip(built.blocks, closed.blocks)):
            bad.append(name)
    report(10, "closed forms span the constructed degree blocks", not bad, f"failures: {bad or 'none'}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
