"""Block three-term relations, Jacobi operators and the Favard direction.

Congruence modulo I(V) is always checked as equality of values on V, which
is equivalent for a finite point set.  Matrices are exact object arrays on
the exact path and float arrays on the orthonormal path.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactlinalg as xl
from .errors import CoincidentCoordinate, ExhaustedAttempts, RankDeficient, ShapeMismatch, SingularMatrix
from .orthogonalize import (
    MomentFunctional,
    OrthoBasis,
    WeightFn,
    block_pairing,
    block_values,
    check_orthogonality,
    value_pairing,
)
from .poly import Poly
from .staircase import PointSet, Staircase, interpolate


def _is_float(M) -> bool:
    return np.asarray(M).dtype == float


def _right_divide(X: np.ndarray, H: np.ndarray) -> np.ndarray:
    """X @ inv(H) for symmetric H."""
    if _is_float(X) or _is_float(H):
        return np.linalg.solve(np.asarray(H, float), np.asarray(X, float).T).T
    return xl.solve(H, X.T).T


def _empty(r: int, c: int, exact: bool) -> np.ndarray:
    return xl.zeros(r, c) if exact else np.zeros((r, c))


def _rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if M.dtype == float:
        return int(np.linalg.matrix_rank(M))
    return xl.rank(M)


@dataclass(frozen=True)
class Recurrence:
    """Coefficient matrices of ``x_i P_k = A_{k,i} P_{k+1} + B_{k,i} P_k + C_{k,i} P_{k-1}``.

    ``A`` is indexed ``[k][i]`` for k < n; ``B`` and ``C`` also carry the top
    degree k = n, where the relation has no A term on a finite point set.
    ``C[0][i]`` is an empty r_0 x 0 matrix.
    """

    dimension: int
    sizes: tuple[int, ...]
    A: tuple[tuple[np.ndarray, ...], ...]
    B: tuple[tuple[np.ndarray, ...], ...]
    C: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        r = self.sizes
        n = len(r) - 1
        if len(self.A) != n or len(self.B) not in (n, n + 1) or len(self.C) != len(self.B):
            raise ShapeMismatch("recurrence has the wrong number of degrees")
        for k in range(len(self.B)):
            for i in range(self.dimension):
                if k < n and np.shape(self.A[k][i]) != (r[k], r[k + 1]):
                    raise ShapeMismatch(f"A[{k}][{i}] has shape {np.shape(self.A[k][i])}")
                if np.shape(self.B[k][i]) != (r[k], r[k]):
                    raise ShapeMismatch(f"B[{k}][{i}] has shape {np.shape(self.B[k][i])}")
                if np.shape(self.C[k][i]) != (r[k], r[k - 1] if k else 0):
                    raise ShapeMismatch(f"C[{k}][{i}] has shape {np.shape(self.C[k][i])}")

    @property
    def top_degree(self) -> int:
        return len(self.sizes) - 1

    @property
    def exact(self) -> bool:
        return not any(_is_float(m) for grp in (self.A, self.B, self.C) for row in grp for m in row)

    def composite_A(self, k: int) -> np.ndarray:
        return np.vstack(self.A[k])

    def composite_C(self, k: int) -> np.ndarray:
        return np.hstack(self.C[k])


def compute_recurrence(basis: OrthoBasis, L: MomentFunctional | None = None) -> Recurrence:
    """Project ``x_i P_k`` onto neighbouring blocks through the Gram blocks."""
    L = L or basis.functional
    blocks = basis.blocks
    n = len(blocks) - 1
    d = basis.dimension
    vals = [block_values(b, L.V.points) for b in blocks]
    H = [value_pairing(L, v, v) for v in vals]
    exact = basis.exact and L.W.exact
    A, B, C = [], [], []
    for k in range(n + 1):
        Ak, Bk, Ck = [], [], []
        for i in range(d):
            if k < n:
                Ak.append(_right_divide(value_pairing(L, vals[k], vals[k + 1], i), H[k + 1]))
            Bk.append(_right_divide(value_pairing(L, vals[k], vals[k], i), H[k]))
            if k:
                Ck.append(_right_divide(value_pairing(L, vals[k], vals[k - 1], i), H[k - 1]))
            else:
                Ck.append(_empty(len(blocks[0]), 0, exact))
        if k < n:
            A.append(tuple(Ak))
        B.append(tuple(Bk))
        C.append(tuple(Ck))
    if exact:
        A = [tuple(xl.as_exact(m) for m in row) for row in A]
        B = [tuple(xl.as_exact(m) for m in row) for row in B]
        C = [tuple(xl.as_exact(m) for m in row) for row in C]
    return Recurrence(d, basis.sizes, tuple(A), tuple(B), tuple(C))


@dataclass
class ThreeTermReport:
    passed: bool
    max_residual: object
    counterexample: dict | None = None
    checked: int = 0


def closed_rows(basis: OrthoBasis) -> set[tuple[int, int, int]]:
    """Triples (k, i, row) whose product x_i P_{k,row} lies in the span of the basis.

    For a basis of R[V] this is every triple once products are read modulo
    I(V); this test is for truncated families, where it is done on plain
    polynomials.
    """
    polys = basis.polynomials()
    mons = sorted({a for p in polys for a in p.terms} | {tuple(e + (j == i) for j, e in enumerate(a)) for p in polys for a in p.terms for i in range(basis.dimension)})
    exact = basis.exact

    def row(p):
        return [p.coefficient(a) if not exact else Fraction(p.coefficient(a)) for a in mons]

    M = np.array([row(p) for p in polys], dtype=object if exact else float)
    r = _rank(M)
    out = set()
    for k, block in enumerate(basis.blocks):
        for i in range(basis.dimension):
            for j, p in enumerate(block):
                ext = np.vstack([M, np.array([row(p.mul_var(i))], dtype=M.dtype)])
                if _rank(ext) == r:
                    out.add((k, i, j))
    return out


def verify_three_term(
    rec: Recurrence,
    basis: OrthoBasis,
    V: PointSet,
    tol: float = 0.0,
    include_top: bool = True,
    rows: set[tuple[int, int, int]] | None = None,
) -> ThreeTermReport:
    """Evaluate both sides of the relation at every point of V.

    Degrees 0..n-1 are checked, plus the top degree when ``rec`` carries it
    and ``include_top`` is set.  ``rows`` restricts the check to the given
    (k, i, row) triples, which is needed for a basis that does not span R[V]
    (see ``closed_rows``).  On the exact path any nonzero residual fails;
    ``tol`` is for float data.
    """
    if tuple(basis.sizes) != tuple(rec.sizes) or rec.dimension != basis.dimension:
        raise ShapeMismatch("recurrence and basis have different block structure")
    vals = [block_values(b, V.points) for b in basis.blocks]
    worst = 0
    where = None
    checked = 0
    degrees = len(rec.B) if include_top else rec.top_degree
    for k in range(degrees):
        for i in range(rec.dimension):
            xi = np.array([x[i] for x in V.points], dtype=object)
            lhs = vals[k] * xi
            rhs = rec.B[k][i] @ vals[k]
            if k < rec.top_degree:
                rhs = rhs + rec.A[k][i] @ vals[k + 1]
            if k:
                rhs = rhs + rec.C[k][i] @ vals[k - 1]
            diff = lhs - rhs
            for (row, pt), v in np.ndenumerate(diff):
                if rows is not None and (k, i, row) not in rows:
                    continue
                checked += 1
                if abs(v) > worst:
                    worst = abs(v)
                    if worst > tol:
                        where = where or {"degree": k, "coordinate": i, "point": pt, "row": row}
    return ThreeTermReport(worst <= tol, worst, where if worst > tol else None, checked)


def rank_condition(rec: Recurrence) -> list[dict]:
    """Ranks of the composite A_k and C_{k+1} against r_{k+1}, per degree."""
    out = []
    r = rec.sizes
    for k in range(rec.top_degree):
        ra = _rank(rec.composite_A(k))
        rc = _rank(rec.composite_C(k + 1))
        bound = rec.dimension * r[k] >= r[k + 1]
        out.append(
            {
                "degree": k,
                "rank_A": ra,
                "rank_C": rc,
                "r_next": r[k + 1],
                "dimension_bound": bound,
                "passed": ra == r[k + 1] and rc == r[k + 1] and bound,
            }
        )
    return out


def christoffel_darboux(basis: OrthoBasis, rec: Recurrence, x, y, i: int, k: int):
    """Both sides of the Christoffel-Darboux identity at points x, y.

    The kernel is ``sum_j P_j(x)^T H_j^{-1} P_j(y)``, which reduces to the
    plain sum of products when the basis is orthonormal; the right-hand side
    carries the matching ``H_k^{-1}``.  The Gram blocks stored on the basis
    are used as H.
    """
    if x[i] == y[i]:
        raise CoincidentCoordinate(f"points share coordinate {i}")
    if not 0 <= k < rec.top_degree:
        raise ValueError(f"degree {k} outside 0..{rec.top_degree - 1}")
    exact = basis.exact
    if all(g is not None for g in basis.gram):
        H = list(basis.gram)
    else:
        H = [block_pairing(basis.functional, b, b) for b in basis.blocks]

    def vec(j, p):
        v = block_values(basis.blocks[j], [p])[:, 0]
        return v if exact else v.astype(float)

    def kernel(j, u, v):
        return u @ _solve_vec(H[j], v)

    lhs = sum((kernel(j, vec(j, x), vec(j, y)) for j in range(k + 1)), Fraction(0) if exact else 0.0)
    A = rec.A[k][i]
    t1 = vec(k + 1, x) @ A.T @ _solve_vec(H[k], vec(k, y))
    t2 = _solve_vec(H[k], vec(k, x)) @ A @ vec(k + 1, y)
    rhs = (t1 - t2) / (x[i] - y[i] if exact else float(x[i] - y[i]))
    return lhs, rhs


def _solve_vec(H, v):
    if _is_float(H) or _is_float(v):
        return np.linalg.solve(np.asarray(H, float), np.asarray(v, float))
    return xl.solve(H, v)


@dataclass(frozen=True)
class JacobiOperator:
    coordinate: int
    matrix: np.ndarray
    sizes: tuple[int, ...]


def jacobi_operators(rec: Recurrence) -> list[JacobiOperator]:
    """Block tridiagonal matrices of multiplication by each coordinate.

    Row block k holds the coefficients of ``x_i P_k``: C on the left, B on
    the diagonal, A on the right, through the top degree.  On the float
    (orthonormal) path the sub-diagonal is taken as A_{k-1,i}^T.
    """
    r = rec.sizes
    exact = rec.exact
    offsets = [0, *itertools.accumulate(r)]
    total = offsets[-1]
    nb = len(rec.B)
    ops = []
    for i in range(rec.dimension):
        J = xl.zeros(total, total) if exact else np.zeros((total, total))
        for k in range(nb):
            rs = slice(offsets[k], offsets[k + 1])
            J[rs, rs] = rec.B[k][i]
            if k < rec.top_degree:
                J[rs, offsets[k + 1] : offsets[k + 2]] = rec.A[k][i]
            if k:
                J[rs, offsets[k - 1] : offsets[k]] = rec.C[k][i] if exact else rec.A[k - 1][i].T
        ops.append(JacobiOperator(i, J, tuple(r)))
    return ops


@dataclass
class CommuteReport:
    passed: bool
    max_entry: object
    pairs: list[tuple[int, int]] = field(default_factory=list)


def commute_check(ops: Sequence[JacobiOperator], tol: float = 0.0) -> CommuteReport:
    worst = 0
    bad = []
    for a, b in itertools.combinations(ops, 2):
        D = a.matrix @ b.matrix - b.matrix @ a.matrix
        m = max((abs(v) for v in D.flat), default=0)
        worst = max(worst, m)
        if m > tol:
            bad.append((a.coordinate, b.coordinate))
    return CommuteReport(not bad, worst, bad)


def generalized_inverse(rec: Recurrence, k: int) -> tuple[np.ndarray, ...]:
    """Split left inverse D_k^T of the composite A_k into its d column blocks."""
    Ak = rec.composite_A(k)
    if _rank(Ak) < rec.sizes[k + 1]:
        raise RankDeficient(f"composite A_{k} is rank deficient", degree=k)
    Dt = np.linalg.pinv(np.asarray(Ak, float)) if _is_float(Ak) else xl.left_inverse(Ak)
    rk = rec.sizes[k]
    return tuple(Dt[:, i * rk : (i + 1) * rk] for i in range(rec.dimension))


def favard_reconstruct(
    rec: Recurrence,
    lam: Staircase,
    reference: PointSet | None = None,
    initial: Poly | None = None,
) -> tuple[tuple[Poly, ...], ...]:
    """Rebuild the degree blocks from recurrence data alone.

    ``P_{k+1} = sum_i D_{k,i}^T (x_i P_k - B_{k,i} P_k - C_{k,i} P_{k-1})``
    where D_k^T is a left inverse of the composite A_k.  With a reference
    point set the products are reduced onto the staircase by interpolation
    on it; otherwise they are kept as plain polynomials.
    """
    d = rec.dimension
    if sum(rec.sizes) != len(lam) or lam.sizes != tuple(rec.sizes):
        raise ShapeMismatch("staircase block sizes do not match the recurrence")
    if rec.sizes[0] != 1:
        raise ShapeMismatch("degree-0 block must have a single polynomial")
    initial = initial or Poly.constant(d, 1)
    Ds = [generalized_inverse(rec, k) for k in range(rec.top_degree)]
    exact = rec.exact

    if reference is not None:
        pts = reference.points
        v0 = block_values([initial], pts)
        vals = [v0 if exact else v0.astype(float)]
        coords = [np.array([x[i] for x in pts], dtype=object if exact else float) for i in range(d)]
        for k in range(rec.top_degree):
            acc = None
            for i in range(d):
                t = vals[k] * coords[i] - rec.B[k][i] @ vals[k]
                if k:
                    t = t - rec.C[k][i] @ vals[k - 1]
                term = Ds[k][i] @ t
                acc = term if acc is None else acc + term
            vals.append(acc)
        out = []
        for v in vals:
            if exact:
                out.append(tuple(interpolate(row, reference, lam) for row in v))
            else:
                E = np.array([[float(xx) for xx in row] for row in _monomial_rows(reference, lam)])
                coeffs = np.linalg.solve(E.T, np.asarray(v, float).T).T
                out.append(tuple(Poly.from_coefficients(d, lam.indices, c) for c in coeffs))
        return tuple(out)

    blocks: list[list[Poly]] = [[initial]]
    for k in range(rec.top_degree):
        nxt = [Poly.constant(d, 0) for _ in range(rec.sizes[k + 1])]
        for i in range(d):
            t = [p.mul_var(i) for p in blocks[k]]
            t = [tp - _combine(rec.B[k][i][row], blocks[k]) for row, tp in enumerate(t)]
            if k:
                t = [tp - _combine(rec.C[k][i][row], blocks[k - 1]) for row, tp in enumerate(t)]
            for row in range(len(nxt)):
                nxt[row] = nxt[row] + _combine(Ds[k][i][row], t)
        blocks.append(nxt)
    return tuple(tuple(b) for b in blocks)


def _combine(coeffs, polys: Sequence[Poly]) -> Poly:
    out = Poly.constant(polys[0].dim, 0) if polys else None
    for c, p in zip(coeffs, polys):
        if c != 0:
            out = out + p * c
    return out


def _monomial_rows(V: PointSet, lam: Staircase):
    from .staircase import eval_matrix

    return eval_matrix(V, lam.indices)


def _configurations(pool, n: int, d: int, rng: random.Random, attempts: int):
    if pool is not None:
        pool = list(pool)
        if len(pool) < n:
            return
        if math.comb(len(pool), n) <= attempts:
            yield from (list(c) for c in itertools.combinations(pool, n))
            return
        seen = set()
        first = tuple(range(n))
        seen.add(first)
        yield pool[:n]
        while True:
            pick = tuple(sorted(rng.sample(range(len(pool)), n)))
            if pick in seen:
                continue
            seen.add(pick)
            yield [pool[j] for j in pick]
    else:
        box = range(-n, n + 1)
        while True:
            pts: set = set()
            while len(pts) < n:
                pts.add(tuple(Fraction(rng.choice(box)) for _ in range(d)))
            yield sorted(pts)


def recover_measure(
    blocks: Sequence[Sequence[Poly]],
    candidates: PointSet | None = None,
    seed: int = 0,
    attempts: int = 64,
    require_orthogonal: bool = True,
    tol: float = 1e-12,
) -> tuple[PointSet, WeightFn]:
    """Find points x_1..x_N and nonzero weights realizing ``L P = delta``.

    Configurations come from ``candidates`` (first N points first, then
    seeded subsets) or from seeded integer points in [-N, N]^d.  An attempt
    succeeds when the evaluation matrix is nonsingular, every weight is
    nonzero and, with ``require_orthogonal``, the blocks are orthogonal under
    the recovered functional.  ``tol`` applies only to float blocks.
    """
    polys = [p for b in blocks for p in b]
    n = len(polys)
    d = polys[0].dim
    exact = all(not isinstance(c, float) for p in polys for c in p.terms.values())
    c0 = polys[0].coefficient((0,) * d)
    rng = random.Random(seed)
    pool = candidates.points if candidates is not None else None
    tried = 0
    for config in _configurations(pool, n, d, rng, attempts):
        if tried >= attempts:
            break
        tried += 1
        P = block_values(polys, config)
        rhs = [c0] + [0] * (n - 1)
        if exact:
            try:
                lam = xl.solve(P, np.array([Fraction(v) for v in rhs], dtype=object))
            except SingularMatrix:
                continue
            if any(v == 0 for v in lam):
                continue
            W = WeightFn(tuple(lam))
        else:
            P = np.asarray(P, float)
            if np.linalg.matrix_rank(P) < n:
                continue
            lam = np.linalg.solve(P, np.array(rhs, float))
            if np.any(np.abs(lam) <= tol):
                continue
            W = WeightFn(tuple(float(v) for v in lam))
        V = PointSet(d, tuple(tuple(p) for p in config))
        if require_orthogonal:
            report = check_orthogonality(blocks, MomentFunctional(V, W), tol=0.0 if exact else tol)
            if not report.passed:
                continue
        return V, W
    raise ExhaustedAttempts(tried)
