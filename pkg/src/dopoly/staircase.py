"""Point sets, graded monomial orders and the staircase of a finite point set.

The staircase Λ(V) is the set of exponents whose monomials are not leading
terms of the vanishing ideal I(V).  It is found greedily from evaluation
vectors: monomials are scanned in increasing graded order and kept whenever
their evaluation row is independent of the rows kept so far.  Reduction
modulo I(V) is done by interpolation on V instead of Gröbner division.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegreeOutOfRange, DimensionMismatch, InsufficientNodes, NotNonincreasing
from .exactlinalg import solve, to_fraction, zeros
from .poly import MultiIndex, Poly, monomial_value, unit

ORDER_KINDS = ("grlex", "grevlex")


@dataclass(frozen=True)
class MonomialOrder:
    """A graded order on exponent tuples.

    ``grlex`` breaks degree ties lexicographically (larger leading exponent
    wins, variables in ``precedence`` order).  ``grevlex`` breaks them the
    other way round: within a degree, the monomial with the *smaller* exponent
    in the first precedence variable is larger.  In two variables this puts
    y^2 > xy > x^2, so the two kinds give different staircases on the same
    point set.  ``precedence`` is a 0-based permutation of the variables.
    """

    kind: str = "grevlex"
    precedence: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.precedence is not None and sorted(self.precedence) != list(range(len(self.precedence))):
            raise ValueError(f"precedence {self.precedence} is not a permutation")

    def key(self, alpha: MultiIndex) -> tuple:
        perm = self.precedence or range(len(alpha))
        ranked = tuple(alpha[p] for p in perm)
        if self.kind == "grevlex":
            ranked = tuple(-e for e in ranked)
        return (sum(alpha), ranked)

    def sort(self, indices) -> list[MultiIndex]:
        return sorted(indices, key=self.key)

    def monomials_of_degree(self, d: int, k: int) -> list[MultiIndex]:
        """All exponents of total degree k in d variables, ascending."""
        out = [c for c in itertools.product(range(k + 1), repeat=d) if sum(c) == k]
        return self.sort(out)


@dataclass(frozen=True)
class PointSet:
    dimension: int
    points: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        pts = tuple(tuple(to_fraction(c) for c in p) for p in self.points)
        if any(len(p) != self.dimension for p in pts):
            raise DimensionMismatch("point with wrong number of coordinates")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, points) -> "PointSet":
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValueError("empty point set needs an explicit dimension")
        return cls(len(pts[0]), tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def coordinate(self, i: int) -> list[Fraction]:
        return [p[i] for p in self.points]


@dataclass(frozen=True)
class Staircase:
    """Exponents indexing a monomial basis of R[V], sorted by ``order``."""

    dimension: int
    indices: tuple[MultiIndex, ...]
    order: MonomialOrder = field(default_factory=MonomialOrder)

    def __post_init__(self):
        idx = tuple(tuple(int(e) for e in a) for a in self.indices)
        if any(len(a) != self.dimension for a in idx):
            raise DimensionMismatch("index of the wrong dimension")
        object.__setattr__(self, "indices", tuple(self.order.sort(idx)))

    def __len__(self):
        return len(self.indices)

    def __contains__(self, alpha):
        return tuple(alpha) in self._position

    @cached_property
    def _position(self) -> dict[MultiIndex, int]:
        return {a: i for i, a in enumerate(self.indices)}

    def position(self, alpha: MultiIndex) -> int:
        return self._position[tuple(alpha)]

    @property
    def top_degree(self) -> int:
        return max(sum(a) for a in self.indices)

    def block(self, k: int) -> tuple[MultiIndex, ...]:
        return tuple(a for a in self.indices if sum(a) == k)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(self.block(k)) for k in range(self.top_degree + 1))

    def upto(self, k: int) -> tuple[MultiIndex, ...]:
        return tuple(a for a in self.indices if sum(a) <= k)

    def is_lower_set(self) -> bool:
        s = set(self.indices)
        return all(
            tuple(e - (j == i) for j, e in enumerate(a)) in s
            for a in self.indices
            for i in range(self.dimension)
            if a[i] > 0
        )


def eval_matrix(V: PointSet, monomials: Sequence[MultiIndex]) -> np.ndarray:
    """Row j holds monomial j evaluated at every point of V."""
    out = zeros(len(monomials), len(V))
    for j, alpha in enumerate(monomials):
        if len(alpha) != V.dimension:
            raise DimensionMismatch(f"monomial {alpha} in dimension {V.dimension}")
        for i, x in enumerate(V.points):
            out[j, i] = Fraction(monomial_value(x, alpha))
    return out


def compute_staircase(V: PointSet, order: MonomialOrder | None = None) -> Staircase:
    """Greedy rank scan over monomials in increasing graded order."""
    order = order or MonomialOrder()
    n = len(V)
    if n == 0:
        raise ValueError("point set is empty")
    accepted: list[MultiIndex] = []
    reduced: list[list[Fraction]] = []
    leads: list[int] = []
    k = 0
    while len(accepted) < n:
        took_any = False
        for alpha in order.monomials_of_degree(V.dimension, k):
            row = [Fraction(monomial_value(x, alpha)) for x in V.points]
            for b, c in zip(reduced, leads):
                if row[c] != 0:
                    f = row[c] / b[c]
                    row = [u - f * v for u, v in zip(row, b)]
            lead = next((c for c, u in enumerate(row) if u != 0), None)
            if lead is None:
                continue
            accepted.append(alpha)
            reduced.append(row)
            leads.append(lead)
            took_any = True
            if len(accepted) == n:
                break
        if not took_any:  # pragma: no cover - impossible for distinct points
            raise RuntimeError("staircase scan stalled")
        k += 1
    return Staircase(V.dimension, tuple(accepted), order)


def stair_grid(xs: Sequence, ys: Sequence, heights: Sequence[int], order: MonomialOrder | None = None):
    """Stair-shaped grid {(x_k, y_l): k <= heights[l]} and its predicted staircase."""
    xs = [to_fraction(v) for v in xs]
    ys = [to_fraction(v) for v in ys]
    heights = [int(h) for h in heights]
    if not heights:
        raise ValueError("need at least one row height")
    if any(a < b for a, b in zip(heights, heights[1:])) or heights[-1] < 0:
        raise NotNonincreasing(f"heights {heights} must be nonincreasing and >= 0")
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        raise ValueError("grid nodes must be pairwise distinct")
    m = len(heights) - 1
    if len(xs) <= heights[0] or len(ys) <= m:
        raise InsufficientNodes(f"need {heights[0] + 1} x-nodes and {m + 1} y-nodes")
    pts = tuple((xs[k], ys[l]) for l in range(m + 1) for k in range(heights[l] + 1))
    lam = tuple((k, l) for l in range(m + 1) for k in range(heights[l] + 1))
    return PointSet(2, pts), Staircase(2, lam, order or MonomialOrder())


def _basis_matrix(V: PointSet, lam: Staircase) -> np.ndarray:
    if V.dimension != lam.dimension:
        raise DimensionMismatch("point set and staircase dimensions differ")
    return eval_matrix(V, lam.indices)


def interpolate(values: Sequence, V: PointSet, lam: Staircase) -> Poly:
    """The unique polynomial supported on ``lam`` taking ``values`` on V."""
    E = _basis_matrix(V, lam)
    coeffs = solve(E.T, np.array([Fraction(v) for v in values], dtype=object))
    return Poly.from_coefficients(lam.dimension, lam.indices, coeffs)


def normal_form(p: Poly, V: PointSet, lam: Staircase) -> Poly:
    """Representative of p modulo I(V) supported on the staircase."""
    if p.dim != V.dimension:
        raise DimensionMismatch("polynomial and point set dimensions differ")
    return interpolate([p(x) for x in V.points], V, lam)


def shift_matrix(lam: Staircase, k: int, i: int) -> np.ndarray:
    """0/1 matrix of multiplication by x_i from degree k to k+1 modulo LT(I)."""
    if not 0 <= k < lam.top_degree:
        raise DegreeOutOfRange(f"degree {k} outside 0..{lam.top_degree - 1}")
    rows = lam.block(k)
    cols = {a: j for j, a in enumerate(lam.block(k + 1))}
    out = zeros(len(rows), len(cols))
    e = unit(lam.dimension, i)
    for r, a in enumerate(rows):
        b = tuple(x + y for x, y in zip(a, e))
        if b in cols:
            out[r, cols[b]] = Fraction(1)
    return out
