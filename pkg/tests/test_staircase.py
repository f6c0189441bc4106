from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import point_sets, small_rationals
from dopoly.errors import DegreeOutOfRange, InsufficientNodes, NotNonincreasing
from dopoly.exactlinalg import rank as rank_of
from dopoly.poly import Poly
from dopoly.staircase import (
    MonomialOrder,
    PointSet,
    compute_staircase,
    eval_matrix,
    interpolate,
    normal_form,
    shift_matrix,
    stair_grid,
)


def groebner_staircase(V: PointSet, order: MonomialOrder) -> set:
    """Standard monomials of I(V) from a sympy Groebner basis.

    The ideal is generated by the vanishing polynomials of degree <= |V|,
    obtained as the kernel of the evaluation matrix.
    """
    d = V.dimension
    gens = sympy.symbols(f"t0:{d}")
    top = len(V)
    mons = [a for a in product(range(top + 1), repeat=d) if sum(a) <= top]
    E = sympy.Matrix([[sympy.Rational(*(lambda f: (f.numerator, f.denominator))(Fraction(np.prod([c**e for c, e in zip(x, a)]) if a else 1))) for a in mons] for x in V.points])
    polys = []
    for vec in E.nullspace():
        polys.append(sum(c * sympy.prod([g**e for g, e in zip(gens, a)]) for c, a in zip(vec, mons)))
    # our grevlex is sympy's grevlex with the generators reversed
    if order.kind == "grevlex":
        G = sympy.groebner(polys, *reversed(gens), order="grevlex")
        lead = [sympy.Poly(g, *reversed(gens)).monoms(order="grevlex")[0][::-1] for g in G.exprs]
    else:
        G = sympy.groebner(polys, *gens, order="grlex")
        lead = [sympy.Poly(g, *gens).monoms(order="grlex")[0] for g in G.exprs]
    return {a for a in mons if not any(all(x >= y for x, y in zip(a, lt)) for lt in lead)}


def test_order_conventions():
    rev, lex = MonomialOrder("grevlex"), MonomialOrder("grlex")
    assert rev.monomials_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert lex.monomials_of_degree(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert MonomialOrder("grlex", (1, 0)).monomials_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]
    with pytest.raises(ValueError):
        MonomialOrder("lex")
    with pytest.raises(ValueError):
        MonomialOrder("grlex", (0, 0))


def test_four_point_staircases(four):
    assert set(compute_staircase(four, MonomialOrder("grevlex")).indices) == {(0, 0), (1, 0), (0, 1), (2, 0)}
    assert set(compute_staircase(four, MonomialOrder("grlex")).indices) == {(0, 0), (1, 0), (0, 1), (0, 2)}


def test_eight_point_staircase(eight):
    lam = compute_staircase(eight)
    assert lam.indices == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (0, 3))
    assert lam.sizes == (1, 2, 3, 2)


def test_single_point():
    lam = compute_staircase(PointSet.of([(3, 4)]))
    assert lam.indices == ((0, 0),)


@given(point_sets(dim=2, max_size=6), st.sampled_from(["grlex", "grevlex"]))
def test_staircase_matches_groebner(V, kind):
    order = MonomialOrder(kind)
    assert set(compute_staircase(V, order).indices) == groebner_staircase(V, order)


@given(point_sets(dim=3, max_size=5, span=2), st.sampled_from(["grlex", "grevlex"]))
def test_staircase_matches_groebner_3d(V, kind):
    order = MonomialOrder(kind)
    assert set(compute_staircase(V, order).indices) == groebner_staircase(V, order)


@given(point_sets(dim=2, max_size=9), st.sampled_from(["grlex", "grevlex"]))
def test_staircase_is_lower_set_of_full_size(V, kind):
    lam = compute_staircase(V, MonomialOrder(kind))
    assert len(lam) == len(V)
    assert lam.is_lower_set()
    assert all(s > 0 for s in lam.sizes)


@given(point_sets(dim=2, max_size=9))
def test_block_sizes_obey_dimension_bound(V):
    r = compute_staircase(V).sizes
    assert all(2 * a >= b for a, b in zip(r, r[1:]))


def test_stair_grid_prediction():
    V, lam = stair_grid([0, 1, 2], [0, 1, 2, 3], [2, 2, 0, 0])
    assert len(V) == 8
    assert set(compute_staircase(V).indices) == set(lam.indices)
    with pytest.raises(NotNonincreasing):
        stair_grid([0, 1, 2], [0, 1], [0, 2])
    with pytest.raises(InsufficientNodes):
        stair_grid([0, 1], [0, 1], [2, 1])


@given(
    st.lists(st.integers(0, 3), min_size=1, max_size=4).map(lambda h: sorted(h, reverse=True)),
    st.sampled_from(["grlex", "grevlex"]),
)
def test_stair_grid_staircase_is_the_grid(heights, kind):
    xs = [Fraction(k, 2) for k in range(4)]
    ys = [Fraction(-l) for l in range(4)]
    V, lam = stair_grid(xs, ys, heights, MonomialOrder(kind))
    assert set(compute_staircase(V, MonomialOrder(kind)).indices) == set(lam.indices)


def test_eval_matrix_shape(eight):
    E = eval_matrix(eight, [(0, 0), (1, 0)])
    assert E.shape == (2, 8)
    assert list(E[1]) == [-1, 0, 1, -1, 0, 1, -1, -1]


@st.composite
def poly_on(draw):
    terms = draw(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), small_rationals, max_size=4))
    return Poly(2, terms)


@given(point_sets(dim=2, min_size=2, max_size=6), poly_on(), poly_on(), small_rationals)
def test_normal_form_projection(V, p, q, c):
    lam = compute_staircase(V)
    nf = normal_form(p, V, lam)
    assert nf.support_within(lam.indices)
    assert all(nf(x) == p(x) for x in V.points)
    assert normal_form(nf, V, lam) == nf
    assert normal_form(p + q * c, V, lam) == nf + normal_form(q, V, lam) * c


def test_interpolate_hits_values(four):
    lam = compute_staircase(four)
    vals = [Fraction(v) for v in (1, -2, 3, 5)]
    p = interpolate(vals, four, lam)
    assert [p(x) for x in four.points] == vals


def test_shift_matrix_marks_missing_neighbours():
    V, lam = stair_grid([0, 1, 2], [0, 1, 2, 3], [2, 2, 0, 0])
    L = shift_matrix(lam, 1, 0)
    rows = lam.block(1)
    cols = lam.block(2)
    r = rows.index((0, 1))
    assert list(L[r]) == [1 if c == (1, 1) else 0 for c in cols]
    # degree 2, x-shift: (3,0) and (1,2) leave the staircase, (1,1) -> (2,1) stays
    L2 = shift_matrix(lam, 2, 0)
    b2 = lam.block(2)
    assert all(v == 0 for v in L2[b2.index((2, 0))])
    assert all(v == 0 for v in L2[b2.index((0, 2))])
    assert list(L2[b2.index((1, 1))]) == [1 if c == (2, 1) else 0 for c in lam.block(3)]
    for k in range(lam.top_degree):
        stacked = np.vstack([shift_matrix(lam, k, i) for i in range(2)])
        assert rank_of(stacked) == lam.sizes[k + 1]
    with pytest.raises(DegreeOutOfRange):
        shift_matrix(lam, lam.top_degree, 0)


def test_points_must_be_distinct():
    with pytest.raises(ValueError):
        PointSet.of([(0, 0), (0, 0)])
