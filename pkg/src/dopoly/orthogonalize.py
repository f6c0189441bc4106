"""Moment functionals on weighted point sets and orthogonal degree blocks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ExistenceFailure, NotPositive, PivotBreakdown, ShapeMismatch, ZeroPolynomial
from .exactlinalg import identity, rank, solve, symmetric_factor, to_fraction
from .poly import MultiIndex, Poly, monomial_value
from .staircase import MonomialOrder, PointSet, Staircase, eval_matrix


@dataclass(frozen=True)
class WeightFn:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(v if isinstance(v, float) else to_fraction(v) for v in self.values)
        if any(v == 0 for v in vals):
            raise ValueError("weights must be nonzero")
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, n: int) -> "WeightFn":
        return cls((Fraction(1, n),) * n)

    @property
    def exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.values)

    @property
    def positive(self) -> bool:
        return all(v > 0 for v in self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class MomentFunctional:
    """``L f = sum over x in V of f(x) W(x)``."""

    V: PointSet
    W: WeightFn

    def __post_init__(self):
        if len(self.V) != len(self.W):
            raise ShapeMismatch(f"{len(self.W)} weights for {len(self.V)} points")

    @classmethod
    def uniform(cls, V: PointSet) -> "MomentFunctional":
        return cls(V, WeightFn.uniform(len(V)))

    def __call__(self, f: Poly):
        return sum((f(x) * w for x, w in zip(self.V.points, self.W.values)), Fraction(0))


def moment(L: MomentFunctional, alpha: MultiIndex) -> Fraction:
    return sum((monomial_value(x, alpha) * w for x, w in zip(L.V.points, L.W.values)), Fraction(0))


def _weighted_gram(L: MomentFunctional, monomials: Sequence[MultiIndex]) -> np.ndarray:
    E = eval_matrix(L.V, monomials)
    w = np.array(L.W.values, dtype=object)
    return (E * w) @ E.T


def gram_matrix(L: MomentFunctional, lam: Staircase, k: int) -> np.ndarray:
    """Moments of all pairs of staircase monomials of degree at most k."""
    return _weighted_gram(L, lam.upto(k))


def existence_check(L: MomentFunctional, lam: Staircase) -> dict[int, bool]:
    """Map each degree k to whether M_k is nonsingular."""
    M = _weighted_gram(L, lam.indices)
    out = {}
    n = 0
    for k, r in enumerate(lam.sizes):
        n += r
        out[k] = rank(M[:n, :n]) == n
    return out


def block_values(block: Sequence[Poly], points) -> np.ndarray:
    vals = [[p(x) for x in points] for p in block]
    flat = [v for row in vals for v in row]
    dtype = float if any(isinstance(v, float) for v in flat) else object
    out = np.empty((len(block), len(points)), dtype=dtype)
    for i, row in enumerate(vals):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def block_pairing(L: MomentFunctional, left: Sequence[Poly], right: Sequence[Poly], coordinate: int | None = None):
    """Matrix ``L(x_i * left * right^T)`` (plain ``L(left right^T)`` without a coordinate)."""
    return value_pairing(L, block_values(left, L.V.points), block_values(right, L.V.points), coordinate)


def value_pairing(L: MomentFunctional, a: np.ndarray, b: np.ndarray, coordinate: int | None = None):
    """``block_pairing`` from precomputed values on L's points."""
    w = list(L.W.values)
    if coordinate is not None:
        w = [wi * x[coordinate] for wi, x in zip(w, L.V.points)]
    if a.dtype == float or b.dtype == float or not L.W.exact:
        a, b = a.astype(float), b.astype(float)
        w = np.array([float(v) for v in w])
    else:
        w = np.array(w, dtype=object)
    return (a * w) @ b.T


@dataclass
class OrthogonalityReport:
    passed: bool
    max_offdiagonal: object
    singular_blocks: list[int]
    counterexample: tuple[int, int] | None = None


def check_orthogonality(blocks: Sequence[Sequence[Poly]], L: MomentFunctional, tol: float = 0.0) -> OrthogonalityReport:
    """Block orthogonality ``L(P_k P_j^T) = 0`` (k != j) and invertible ``H_k``.

    Exact inputs are compared with zero exactly; ``tol`` only matters for
    float coefficients or weights.
    """
    worst = 0
    where = None
    singular = []
    for k, bk in enumerate(blocks):
        for j in range(k):
            G = block_pairing(L, bk, blocks[j])
            m = max((abs(v) for v in G.flat), default=0)
            if m > worst:
                worst, where = m, (k, j)
        H = block_pairing(L, bk, bk)
        if H.dtype == float:
            if H.size and np.linalg.matrix_rank(H) < H.shape[0]:
                singular.append(k)
        elif rank(H) < H.shape[0]:
            singular.append(k)
    passed = (worst <= tol) and not singular
    return OrthogonalityReport(passed, worst, singular, where if worst > tol else None)


@dataclass(frozen=True)
class OrthoBasis:
    """Degree blocks P_0..P_n with their Gram blocks H_k and leading coefficients G_k."""

    staircase: Staircase
    blocks: tuple[tuple[Poly, ...], ...]
    functional: MomentFunctional | None
    gram: tuple[np.ndarray, ...]
    leading: tuple[np.ndarray, ...]
    leading_unscaled: tuple[np.ndarray, ...] | None = None

    @property
    def dimension(self) -> int:
        return self.staircase.dimension

    @property
    def top_degree(self) -> int:
        return len(self.blocks) - 1

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def exact(self) -> bool:
        return all(not isinstance(c, float) for b in self.blocks for p in b for c in p.terms.values())

    def polynomials(self) -> list[Poly]:
        return [p for b in self.blocks for p in b]

    def coefficient_matrix(self, k: int) -> np.ndarray:
        idx = self.staircase.indices
        rows = [p.coefficients(idx) for p in self.blocks[k]]
        dtype = object if self.exact else float
        out = np.zeros((len(rows), len(idx)), dtype=dtype)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                out[i, j] = v if dtype is float else Fraction(v)
        return out


def leading_matrix(block: Sequence[Poly], lam: Staircase, k: int) -> np.ndarray:
    mons = lam.block(k)
    exact = all(not isinstance(c, float) for p in block for c in p.terms.values())
    out = np.zeros((len(block), len(mons)), dtype=object if exact else float)
    for i, p in enumerate(block):
        for j, a in enumerate(mons):
            c = p.coefficient(a)
            out[i, j] = Fraction(c) if exact else c
    return out


def canonical_scale(p: Poly, order: MonomialOrder | None = None) -> Poly:
    """Primitive integer multiple of p whose order-largest term is positive."""
    if p.is_zero():
        raise ZeroPolynomial("cannot scale the zero polynomial")
    order = order or MonomialOrder()
    q = p / p.content()
    lead = q.leading_index(order.key)
    return -q if q.terms[lead] < 0 else q


def _rows_to_polys(P: np.ndarray, lam: Staircase) -> tuple[Poly, ...]:
    return tuple(Poly.from_coefficients(lam.dimension, lam.indices, row) for row in P)


def construct_orthogonal(
    L: MomentFunctional,
    lam: Staircase,
    scale: bool = True,
    within_block: bool = True,
) -> OrthoBasis:
    """Exact orthogonal degree blocks on the staircase of (V, W).

    Each block is first made orthogonal to every lower block.  With
    ``within_block`` the block is then triangularised against its own Gram
    matrix so the members of one degree are mutually orthogonal, which is the
    same as Gram-Schmidt over the staircase monomials in order.  If that
    triangularisation meets a zero pivot (possible for sign-changing weights)
    the block is kept as it is; block orthogonality does not depend on it.
    """
    for k, ok in existence_check(L, lam).items():
        if not ok:
            raise ExistenceFailure(k)
    N = len(lam)
    M = _weighted_gram(L, lam.indices)
    eye = identity(N)
    blocks: list[np.ndarray] = []
    grams: list[np.ndarray] = []
    start = 0
    for k, r in enumerate(lam.sizes):
        X = eye[start : start + r, :]
        start += r
        P = X.copy()
        for Pj, Hj in zip(blocks, grams):
            proj = X @ M @ Pj.T  # r x r_j
            P = P - proj @ solve(Hj, Pj)
        H = P @ M @ P.T
        if within_block:
            try:
                S, _ = symmetric_factor(H)
                P = solve(S, P)
            except PivotBreakdown:
                pass
        blocks.append(P)
        grams.append(P @ M @ P.T)

    polys = [_rows_to_polys(P, lam) for P in blocks]
    unscaled = tuple(leading_matrix(b, lam, k) for k, b in enumerate(polys))
    if scale:
        polys = [tuple(canonical_scale(p, lam.order) for p in b) for b in polys]
        coeffs = [np.array([[Fraction(c) for c in p.coefficients(lam.indices)] for p in b], dtype=object).reshape(len(b), N) for b in polys]
        grams = [P @ M @ P.T for P in coeffs]
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(polys))
    return OrthoBasis(lam, tuple(polys), L, tuple(grams), leading, unscaled)


def orthonormalize(basis: OrthoBasis) -> OrthoBasis:
    """Float orthonormal basis from an exact orthogonal one.

    Each block is diagonalised exactly through ``H_k = S D S^T``; only the
    final division by sqrt(D) is done in floating point.
    """
    L = basis.functional
    if L is None or not L.W.positive:
        raise NotPositive("orthonormalization needs strictly positive weights")
    lam = basis.staircase
    out_blocks = []
    for k, H in enumerate(basis.gram):
        S, D = symmetric_factor(H)
        C = solve(S, basis.coefficient_matrix(k))
        rows = []
        for j in range(C.shape[0]):
            s = math.sqrt(D[j, j].numerator) / math.sqrt(D[j, j].denominator)
            rows.append([float(c) / s for c in C[j]])
        out_blocks.append(tuple(Poly.from_coefficients(lam.dimension, lam.indices, r) for r in rows))
    grams = tuple(np.eye(len(b)) for b in out_blocks)
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(out_blocks))
    return OrthoBasis(lam, tuple(out_blocks), L, grams, leading)
