"""Sparse multivariate polynomials keyed by exponent tuples."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch

MultiIndex = tuple[int, ...]


def unit(d: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(d))


def monomial_value(point: Sequence, alpha: MultiIndex):
    v = 1
    for x, e in zip(point, alpha):
        if e:
            v *= x**e
    return v


class Poly:
    """Polynomial in ``dim`` variables with exact (or float) coefficients.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, object] | None = None):
        self.dim = dim
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != dim:
                raise DimensionMismatch(f"exponent {alpha} in a {dim}-variate polynomial")
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        self.terms = {a: c for a, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, dim: int, value=1) -> "Poly":
        return cls(dim, {(0,) * dim: Fraction(value) if isinstance(value, int) else value})

    @classmethod
    def monomial(cls, alpha: MultiIndex, coeff=Fraction(1)) -> "Poly":
        return cls(len(alpha), {tuple(alpha): coeff})

    @classmethod
    def from_coefficients(cls, dim: int, indices: Sequence[MultiIndex], coeffs: Iterable) -> "Poly":
        return cls(dim, dict(zip(indices, coeffs)))

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: MultiIndex):
        return self.terms.get(tuple(alpha), 0)

    def coefficients(self, indices: Sequence[MultiIndex]) -> list:
        return [self.terms.get(a, 0) for a in indices]

    def support_within(self, indices: Iterable[MultiIndex]) -> bool:
        return set(self.terms) <= set(indices)

    def __call__(self, point: Sequence):
        if len(point) != self.dim:
            raise DimensionMismatch(f"point of dimension {len(point)} for a {self.dim}-variate polynomial")
        return sum((c * monomial_value(point, a) for a, c in self.terms.items()), 0)

    def _check(self, other: "Poly"):
        if other.dim != self.dim:
            raise DimensionMismatch("polynomials in different numbers of variables")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.dim, other)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return Poly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.dim, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.dim, {a: c * other for a, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for a, c in self.terms.items():
            for b, e in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + c * e
        return Poly(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Poly(self.dim, {a: c / scalar for a, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.dim == other.dim and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    def mul_var(self, i: int) -> "Poly":
        """Multiply by the coordinate ``x_i`` (0-based)."""
        return Poly(self.dim, {tuple(e + (j == i) for j, e in enumerate(a)): c for a, c in self.terms.items()})

    def shift(self, offsets: Sequence) -> "Poly":
        """Return ``p(x + offsets)`` expanded."""
        out = Poly.constant(self.dim, 0)
        for a, c in self.terms.items():
            term = Poly.constant(self.dim, c)
            for i, e in enumerate(a):
                lin = Poly.monomial(unit(self.dim, i)) + offsets[i]
                for _ in range(e):
                    term = term * lin
            out = out + term
        return out

    def leading_index(self, key) -> MultiIndex:
        return max(self.terms, key=key)

    def content(self) -> Fraction:
        """Positive rational g with ``self / g`` integral and primitive."""
        cs = [Fraction(c) for c in self.terms.values()]
        num = math.gcd(*(c.numerator for c in cs))
        den = math.lcm(*(c.denominator for c in cs))
        return Fraction(num, den)

    def to_str(self, names: Sequence[str] | None = None, key=None) -> str:
        if not self.terms:
            return "0"
        names = names or (["x", "y", "z"][: self.dim] if self.dim <= 3 else [f"x{i + 1}" for i in range(self.dim)])
        order = sorted(self.terms, key=key) if key else sorted(self.terms, key=lambda a: (sum(a), a))
        parts = []
        for a in order:
            c = self.terms[a]
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, a) if e)
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self.to_str()})"
