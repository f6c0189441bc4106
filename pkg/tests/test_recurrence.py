import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import point_sets, positive_rationals
from dopoly.errors import CoincidentCoordinate, ExhaustedAttempts, RankDeficient
from dopoly.exactlinalg import ratmatrix, zeros
from dopoly.orthogonalize import MomentFunctional, WeightFn, check_orthogonality, construct_orthogonal, orthonormalize
from dopoly.recurrence import (
    Recurrence,
    christoffel_darboux,
    closed_rows,
    commute_check,
    compute_recurrence,
    favard_reconstruct,
    generalized_inverse,
    jacobi_operators,
    rank_condition,
    recover_measure,
    verify_three_term,
)
from dopoly.staircase import PointSet, compute_staircase


@st.composite
def bases(draw, max_size=8):
    V = draw(point_sets(dim=2, min_size=2, max_size=max_size))
    w = draw(st.lists(positive_rationals, min_size=len(V), max_size=len(V)))
    L = MomentFunctional(V, WeightFn(tuple(w)))
    return construct_orthogonal(L, compute_staircase(V))


@pytest.fixture
def eight_basis(eight_uniform):
    return construct_orthogonal(eight_uniform, compute_staircase(eight_uniform.V))


def test_eight_point_recurrence_shapes(eight_basis):
    rec = compute_recurrence(eight_basis)
    assert rec.sizes == (1, 2, 3, 2)
    assert [a.shape for a in rec.A[1]] == [(2, 3), (2, 3)]
    assert rec.composite_A(1).shape == (4, 3)
    assert rec.composite_C(2).shape == (3, 4)


@given(bases())
def test_three_term_exact(basis):
    rec = compute_recurrence(basis)
    report = verify_three_term(rec, basis, basis.functional.V)
    assert report.passed and report.max_residual == 0


@given(bases())
def test_rank_condition_holds(basis):
    rec = compute_recurrence(basis)
    assert all(row["passed"] for row in rank_condition(rec))


@given(bases())
def test_jacobi_operators_commute(basis):
    ops = jacobi_operators(compute_recurrence(basis))
    report = commute_check(ops)
    assert report.passed and report.max_entry == 0


@given(bases(max_size=6))
def test_c_blocks_are_weighted_transposes_of_a(basis):
    # C_{k+1,i} H_k = (A_{k,i} H_{k+1})^T
    rec = compute_recurrence(basis)
    for k in range(rec.top_degree):
        for i in range(2):
            assert (rec.C[k + 1][i] @ basis.gram[k] == (rec.A[k][i] @ basis.gram[k + 1]).T).all()


def test_christoffel_darboux_pairs(eight_basis):
    rec = compute_recurrence(eight_basis)
    pts = eight_basis.functional.V.points
    for k, i in itertools.product(range(3), range(2)):
        for x, y in itertools.permutations(pts, 2):
            if x[i] != y[i]:
                lhs, rhs = christoffel_darboux(eight_basis, rec, x, y, i, k)
                assert lhs == rhs
    with pytest.raises(CoincidentCoordinate):
        christoffel_darboux(eight_basis, rec, pts[0], pts[1], 1, 0)


def test_corrupted_basis_is_located(eight_basis):
    rec = compute_recurrence(eight_basis)
    blocks = [list(b) for b in eight_basis.blocks]
    blocks[2][1] = blocks[2][1] + 1
    import dataclasses

    bad = dataclasses.replace(eight_basis, blocks=tuple(tuple(b) for b in blocks))
    report = verify_three_term(rec, bad, eight_basis.functional.V)
    assert not report.passed
    assert report.counterexample["degree"] in (1, 2, 3)


@given(bases())
def test_favard_round_trip_on_reference(basis):
    V = basis.functional.V
    rec = compute_recurrence(basis)
    blocks = favard_reconstruct(rec, basis.staircase, reference=V)
    assert blocks == basis.blocks
    Vr, W = recover_measure(blocks, V)
    scale = W.values[0] / basis.functional.W.values[0]
    assert Vr.points == V.points
    assert all(a == scale * b for a, b in zip(W.values, basis.functional.W.values))


@given(bases(max_size=6))
def test_favard_without_reference_agrees_on_v(basis):
    V = basis.functional.V
    blocks = favard_reconstruct(compute_recurrence(basis), basis.staircase)
    for got, want in zip(blocks, basis.blocks):
        for p, q in zip(got, want):
            assert all(p(x) == q(x) for x in V.points)


def test_generalized_inverse_rank_deficient():
    sizes = (1, 2)
    A = ((ratmatrix([[1, 0]]), ratmatrix([[2, 0]])),)
    B = ((zeros(1, 1), zeros(1, 1)), (zeros(2, 2), zeros(2, 2)))
    C = ((zeros(1, 0), zeros(1, 0)), (zeros(2, 1), zeros(2, 1)))
    rec = Recurrence(2, sizes, A, B, C)
    assert not rank_condition(rec)[0]["passed"]
    with pytest.raises(RankDeficient) as info:
        generalized_inverse(rec, 0)
    assert info.value.degree == 0


def test_random_candidates_without_orthogonality_requirement():
    V = PointSet.of([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
    L = MomentFunctional.uniform(V)
    basis = construct_orthogonal(L, compute_staircase(V))
    blocks = favard_reconstruct(compute_recurrence(basis), basis.staircase)
    Vr, W = recover_measure(blocks, seed=1, require_orthogonal=False)
    assert len(Vr) == 6 and all(w != 0 for w in W.values)
    # the blocks need not be orthogonal on a random support
    with pytest.raises(ExhaustedAttempts):
        recover_measure(blocks, seed=1)


@given(bases(max_size=7))
def test_orthonormal_path(basis):
    on = orthonormalize(basis)
    rec = compute_recurrence(on)
    for k in range(rec.top_degree):
        for i in range(2):
            assert np.allclose(rec.C[k + 1][i], rec.A[k][i].T, atol=1e-9)
    assert verify_three_term(rec, on, basis.functional.V, tol=1e-9).passed
    assert commute_check(jacobi_operators(rec), tol=1e-9).passed


def test_closed_rows_for_complete_basis(eight_basis):
    # on a basis of R[V] plain products leave the span only at the top degree
    rows = closed_rows(eight_basis)
    assert all(k < 3 for k, _, _ in rows)
