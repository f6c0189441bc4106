"""Exact discrete orthogonal polynomials on finite point sets in R^d."""

from .errors import (
    DopolyError,
    ExhaustedAttempts,
    ExistenceFailure,
    MalformedInput,
    NotPositive,
    RankDeficient,
)
from .exactlinalg import Rational, det, left_inverse, rank, ratmatrix, solve, symmetric_factor
from .orthogonalize import (
    MomentFunctional,
    OrthoBasis,
    WeightFn,
    canonical_scale,
    check_orthogonality,
    construct_orthogonal,
    existence_check,
    orthonormalize,
)
from .poly import Poly
from .recurrence import (
    Recurrence,
    christoffel_darboux,
    commute_check,
    compute_recurrence,
    favard_reconstruct,
    jacobi_operators,
    rank_condition,
    recover_measure,
    verify_three_term,
)
from .staircase import MonomialOrder, PointSet, Staircase, compute_staircase, normal_form, stair_grid

__all__ = [
    "DopolyError",
    "ExhaustedAttempts",
    "ExistenceFailure",
    "MalformedInput",
    "MomentFunctional",
    "MonomialOrder",
    "NotPositive",
    "OrthoBasis",
    "PointSet",
    "Poly",
    "RankDeficient",
    "Rational",
    "Recurrence",
    "Staircase",
    "WeightFn",
    "canonical_scale",
    "check_orthogonality",
    "christoffel_darboux",
    "commute_check",
    "compute_recurrence",
    "compute_staircase",
    "construct_orthogonal",
    "det",
    "existence_check",
    "favard_reconstruct",
    "jacobi_operators",
    "left_inverse",
    "normal_form",
    "orthonormalize",
    "rank",
    "rank_condition",
    "ratmatrix",
    "recover_measure",
    "solve",
    "stair_grid",
    "symmetric_factor",
    "verify_three_term",
]
