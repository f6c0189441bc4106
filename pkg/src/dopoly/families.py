"""Closed-form Hahn and Meixner polynomials and their bivariate products.

Every polynomial is expanded from its terminating hypergeometric series in
exact arithmetic.  Univariate families are bundled with their support,
weights and the coefficients of ``x p_k = a_k p_{k+1} + b_k p_k + c_k p_{k-1}``
so that product bases and their block recurrences can be assembled from
them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegreeOutOfRange
from .exactlinalg import to_fraction, zeros
from .orthogonalize import MomentFunctional, OrthoBasis, WeightFn, block_pairing, leading_matrix
from .poly import Poly
from .recurrence import Recurrence
from .staircase import MonomialOrder, PointSet, Staircase


def pochhammer(a, m: int):
    """Rising factorial (a)_m = a (a+1) ... (a+m-1)."""
    out = Fraction(1) if not isinstance(a, float) else 1.0
    for j in range(m):
        out *= a + j
    return out


def falling_var(j: int, dim: int = 1, var: int = 0, shift=0) -> Poly:
    """The polynomial (-x_var + shift)_j, i.e. prod_{t<j} (t + shift - x_var)."""
    x = Poly.monomial(tuple(1 if i == var else 0 for i in range(dim)))
    out = Poly.constant(dim, 1)
    for t in range(j):
        out = out * (Fraction(t) + shift - x)
    return out


def gen_binomial(top, k: int) -> Fraction:
    """binom(k + a, k) written as (a+1)_k / k! for top = k + a."""
    a = top - k
    return pochhammer(a + 1, k) / math.factorial(k)


# ---------------------------------------------------------------- Hahn


@dataclass(frozen=True)
class HahnParams:
    a: Fraction
    b: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "a", to_fraction(self.a))
        object.__setattr__(self, "b", to_fraction(self.b))
        if self.a <= -1 or self.b <= -1:
            raise ValueError("Hahn parameters need a, b > -1")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("Hahn parameter N must be a positive integer")


def _hahn_poly(n: int, a, b, N: int, dim: int = 1, var: int = 0) -> Poly:
    # terminating 3F2(-n, n+a+b+1, -x; a+1, -N; 1), summed up to N
    out = Poly.constant(dim, 0)
    for j in range(N + 1):
        coef = pochhammer(-n, j) * pochhammer(n + a + b + 1, j)
        if coef == 0:
            continue
        coef /= pochhammer(a + 1, j) * pochhammer(-N, j) * math.factorial(j)
        out = out + falling_var(j, dim, var) * coef
    return out


def hahn(n: int, p: HahnParams) -> Poly:
    """Q_n(x; a, b, N) as an exact univariate polynomial."""
    if not 0 <= n <= p.N:
        raise DegreeOutOfRange(f"Hahn degree {n} outside 0..{p.N}")
    return _hahn_poly(n, p.a, p.b, p.N)


def hahn_weight(x: int, p: HahnParams) -> Fraction:
    return gen_binomial(x + p.a, x) * gen_binomial(p.N - x + p.b, p.N - x)


def hahn_norm(n: int, p: HahnParams) -> Fraction:
    """sum_x w(x) Q_n(x)^2 in closed form."""
    a, b, N = p.a, p.b, p.N
    num = (-1) ** n * math.factorial(n) * pochhammer(b + 1, n)
    den = math.factorial(N) * pochhammer(-N, n) * pochhammer(a + 1, n)
    s = 2 * n + a + b + 1
    if s == 0:  # only at n = 0 with a + b = -1; cancel the common factor
        tail = pochhammer(n + a + b + 2, N)
    else:
        tail = pochhammer(n + a + b + 1, N + 1) / s
    return num * tail / den


def hahn_recurrence(n: int, p: HahnParams) -> tuple[Fraction, Fraction]:
    """(A_n, C_n) with ``-x Q_n = A_n Q_{n+1} - (A_n + C_n) Q_n + C_n Q_{n-1}``.

    Valid for 0 <= n <= N; A_N = 0 because Q_{N+1} is not defined on the
    support.
    """
    a, b, N = p.a, p.b, p.N
    if not 0 <= n <= N:
        raise DegreeOutOfRange(f"Hahn degree {n} outside 0..{N}")
    s = 2 * n + a + b
    if n == 0:
        # (a+b+1) cancels between numerator and denominator
        A = (a + 1) * N / (a + b + 2)
        C = Fraction(0)
    else:
        A = (n + a + b + 1) * (n + a + 1) * (N - n) / ((s + 1) * (s + 2))
        C = n * (n + b) * (n + a + b + N + 1) / (s * (s + 1))
    return Fraction(A), Fraction(C)


# ---------------------------------------------------------------- Meixner


@dataclass(frozen=True)
class MeixnerParams:
    b: Fraction
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", to_fraction(self.b))
        object.__setattr__(self, "c", to_fraction(self.c))
        if self.b <= 0:
            raise ValueError("Meixner parameter b must be positive")
        if not 0 < self.c < 1:
            raise ValueError("Meixner parameter c must lie in (0, 1)")


def meixner(n: int, p: MeixnerParams, dim: int = 1, var: int = 0) -> Poly:
    """M_n(x; b, c) from the terminating 2F1(-n, -x; b; 1 - 1/c)."""
    if n < 0:
        raise DegreeOutOfRange("Meixner degree must be nonnegative")
    z = 1 - 1 / p.c
    out = Poly.constant(dim, 0)
    for j in range(n + 1):
        coef = pochhammer(-n, j) * z**j / (pochhammer(p.b, j) * math.factorial(j))
        out = out + falling_var(j, dim, var) * coef
    return out


def meixner_weight(x: int, p: MeixnerParams) -> Fraction:
    return pochhammer(p.b, x) * p.c**x / math.factorial(x)


def meixner_norm(n: int, p: MeixnerParams) -> float:
    return float(Fraction(math.factorial(n)) / (p.c**n * pochhammer(p.b, n))) / (1 - float(p.c)) ** float(p.b)


def meixner_recurrence(n: int, p: MeixnerParams) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of ``(c-1) x M_n = c(n+b) M_{n+1} - (n+(n+b)c) M_n + n M_{n-1}``."""
    if n < 0:
        raise DegreeOutOfRange("Meixner degree must be nonnegative")
    return p.c * (n + p.b), n + (n + p.b) * p.c, Fraction(n)


@dataclass
class MeixnerNormCheck:
    partial: float
    target: float
    gap: float


def _meixner_terms(m: int, n: int, p: MeixnerParams, T: int):
    Mm, Mn = meixner(m, p), meixner(n, p)
    w = Fraction(1)
    for x in range(T + 1):
        if x:
            w = w * (p.b + x - 1) * p.c / x
        yield w * Mm((x,)) * Mn((x,))


def meixner_partial_sums(m: int, n: int, p: MeixnerParams, T: int) -> list[Fraction]:
    """Exact partial sums S_0..S_T of w(x) M_m(x) M_n(x)."""
    out, acc = [], Fraction(0)
    for t in _meixner_terms(m, n, p, T):
        acc += t
        out.append(acc)
    return out


def meixner_norm_check(m: int, n: int, p: MeixnerParams, truncation: int) -> MeixnerNormCheck:
    """Truncated orthogonality sum over x = 0..truncation against the closed form.

    Terms are accumulated exactly; only the comparison is in floating point.
    """
    if truncation < 0:
        raise ValueError("truncation must be nonnegative")
    partial = float(meixner_partial_sums(m, n, p, truncation)[-1])
    target = meixner_norm(n, p) if m == n else 0.0
    return MeixnerNormCheck(partial, target, abs(partial - target))


def meixner_crossover(m: int, n: int, p: MeixnerParams, T: int) -> int:
    """First x after the last sign change of w M_m M_n within 0..T."""
    last = 0
    prev = None
    for x, t in enumerate(_meixner_terms(m, n, p, T)):
        s = (t > 0) - (t < 0)
        if s == 0:
            continue
        if prev is not None and s != prev:
            last = x
        prev = s
    return last


def meixner_truncation(p: MeixnerParams, rel: float = 2.0**-100, limit: int = 100_000) -> int:
    """Smallest T whose weight term is below ``rel`` times the running weight sum."""
    w = Fraction(1)
    total = Fraction(1)
    for x in range(1, limit):
        w = w * (p.b + x - 1) * p.c / x
        total += w
        if w < rel * total:
            return x
    return limit


# ---------------------------------------------------------------- product bases


@dataclass(frozen=True)
class UnivariateFamily:
    """Orthogonal polynomials p_0..p_n on nodes with weights and recurrence data.

    ``a, b, c`` hold the coefficients of ``x p_k = a_k p_{k+1} + b_k p_k +
    c_k p_{k-1}`` for k = 0..n.
    """

    name: str
    nodes: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]
    polys: tuple[Poly, ...]
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.polys) - 1


def hahn_family(p: HahnParams) -> UnivariateFamily:
    polys = tuple(hahn(k, p) for k in range(p.N + 1))
    A, B, C = [], [], []
    for k in range(p.N + 1):
        An, Cn = hahn_recurrence(k, p)
        A.append(-An)
        B.append(An + Cn)
        C.append(-Cn)
    nodes = tuple(Fraction(x) for x in range(p.N + 1))
    weights = tuple(hahn_weight(x, p) for x in range(p.N + 1))
    return UnivariateFamily("hahn", nodes, weights, polys, tuple(A), tuple(B), tuple(C))


def meixner_family(p: MeixnerParams, degree: int, truncation: int) -> UnivariateFamily:
    """Meixner polynomials up to ``degree`` on the truncated support 0..truncation."""
    polys = tuple(meixner(k, p) for k in range(degree + 1))
    A, B, C = [], [], []
    for k in range(degree + 1):
        up, mid, down = meixner_recurrence(k, p)
        A.append(up / (p.c - 1))
        B.append(-mid / (p.c - 1))
        C.append(down / (p.c - 1))
    nodes = tuple(Fraction(x) for x in range(truncation + 1))
    weights = tuple(meixner_weight(x, p) for x in range(truncation + 1))
    return UnivariateFamily("meixner", nodes, weights, polys, tuple(A), tuple(B), tuple(C))


def _product_entries(k: int, n: int, m: int) -> list[tuple[int, int]]:
    return [(j, k - j) for j in range(max(0, k - m), min(k, n) + 1)]


def product_sizes(n: int, m: int) -> tuple[int, ...]:
    return tuple(len(_product_entries(k, n, m)) for k in range(n + m + 1))


def product_basis(fx: UnivariateFamily, fy: UnivariateFamily, n: int | None = None, m: int | None = None,
                  order: MonomialOrder | None = None) -> OrthoBasis:
    """Products p_j(x) q_l(y) grouped by total degree.

    Block k lists p_j q_{k-j} with j increasing, so block sizes are k+1 up to
    min(n, m), then min(n, m)+1, then shrink to 1 at degree n+m.
    """
    n = fx.degree if n is None else n
    m = fy.degree if m is None else m
    if n > fx.degree or m > fy.degree:
        raise DegreeOutOfRange("requested degree exceeds the family")
    order = order or MonomialOrder()
    lam = Staircase(2, tuple((j, l) for j in range(n + 1) for l in range(m + 1)), order)
    px = [_embed(p, 0) for p in fx.polys]
    qy = [_embed(q, 1) for q in fy.polys]
    blocks = tuple(tuple(px[j] * qy[l] for j, l in _product_entries(k, n, m)) for k in range(n + m + 1))
    pts = tuple((x, y) for x in fx.nodes for y in fy.nodes)
    w = tuple(wx * wy for wx in fx.weights for wy in fy.weights)
    L = MomentFunctional(PointSet(2, pts), WeightFn(w))
    grams = tuple(block_pairing(L, b, b) for b in blocks)
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(blocks))
    return OrthoBasis(lam, blocks, L, grams, leading)


def _embed(p: Poly, var: int) -> Poly:
    return Poly(2, {tuple(a[0] if i == var else 0 for i in range(2)): c for a, c in p.terms.items()})


def _product_block(fx, fy, n, m, k, i, shift) -> np.ndarray:
    rows = _product_entries(k, n, m)
    target = {e: t for t, e in enumerate(_product_entries(k + shift, n, m))} if 0 <= k + shift <= n + m else {}
    out = zeros(len(rows), len(target))
    fam = fx if i == 0 else fy
    coef = {1: fam.a, 0: fam.b, -1: fam.c}[shift]
    for r, (j, l) in enumerate(rows):
        idx = j if i == 0 else l
        dest = (j + shift, l) if i == 0 else (j, l + shift)
        if dest in target:
            out[r, target[dest]] = Fraction(coef[idx])
    return out


def product_recurrence_blocks(fx: UnivariateFamily, fy: UnivariateFamily, k: int, i: int,
                              n: int | None = None, m: int | None = None) -> np.ndarray:
    """Explicit A_{k,i} of the product basis (i = 0 for x, 1 for y)."""
    n = fx.degree if n is None else n
    m = fy.degree if m is None else m
    if not 0 <= k < n + m:
        raise DegreeOutOfRange(f"degree {k} outside 0..{n + m - 1}")
    return _product_block(fx, fy, n, m, k, i, 1)


def product_recurrence(fx: UnivariateFamily, fy: UnivariateFamily, n: int | None = None, m: int | None = None) -> Recurrence:
    """Full A, B, C data of the product basis from the univariate coefficients."""
    n = fx.degree if n is None else n
    m = fy.degree if m is None else m
    top = n + m
    A = tuple(tuple(_product_block(fx, fy, n, m, k, i, 1) for i in range(2)) for k in range(top))
    B = tuple(tuple(_product_block(fx, fy, n, m, k, i, 0) for i in range(2)) for k in range(top + 1))
    C = tuple(tuple(_product_block(fx, fy, n, m, k, i, -1) for i in range(2)) for k in range(top + 1))
    return Recurrence(2, product_sizes(n, m), A, B, C)


# ---------------------------------------------------------------- triangle


@dataclass(frozen=True)
class TriangleHahnParams:
    s1: Fraction
    s2: Fraction
    s3: Fraction
    N: int

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            v = to_fraction(getattr(self, name))
            if v <= -1:
                raise ValueError("triangle Hahn parameters need sigma_i > -1")
            object.__setattr__(self, name, v)
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("triangle Hahn parameter N must be a positive integer")


def triangle_hahn(n: int, m: int, p: TriangleHahnParams) -> Poly:
    """Bivariate Hahn polynomial of degree n in x and m in y on {x + y <= N}.

    The x-factor uses the shifted parameter s2 + s3 + 2m + 1 (m is the
    y-degree); the y-factor is the Hahn polynomial with upper limit N - x,
    multiplied by (x - N)_m so the whole product is polynomial in x.
    """
    s1, s2, s3, N = p.s1, p.s2, p.s3, p.N
    if n < 0 or m < 0 or n + m > N:
        raise DegreeOutOfRange(f"degrees ({n}, {m}) need n + m <= {N}")
    beta = s2 + s3 + 2 * m + 1
    den = pochhammer(s3 + 1, m) * pochhammer(beta, n) * pochhammer(-N, m)
    if den == 0:
        raise ValueError("normalising constant vanishes for these parameters")
    const = (-1) ** (n + m) * pochhammer(s1 + 1, n) * pochhammer(s2 + 1, m) / den

    x = Poly.monomial((1, 0))
    yfac = Poly.constant(2, 0)
    for j in range(m + 1):
        coef = pochhammer(-m, j) * pochhammer(m + s2 + s3 + 1, j) / (pochhammer(s2 + 1, j) * math.factorial(j))
        # (x - N)_m / (x - N)_j
        ratio = Poly.constant(2, 1)
        for t in range(j, m):
            ratio = ratio * (x + (t - N))
        yfac = yfac + falling_var(j, 2, 1) * ratio * coef
    xfac = _hahn_poly(n, s1, beta, N - m, dim=2, var=0)
    return xfac * yfac * const


def triangle_weight(x: int, y: int, p: TriangleHahnParams) -> Fraction:
    z = p.N - x - y
    return gen_binomial(x + p.s1, x) * gen_binomial(y + p.s2, y) * gen_binomial(z + p.s3, z)


def triangle_points(N: int) -> PointSet:
    return PointSet(2, tuple((Fraction(x), Fraction(y)) for x in range(N + 1) for y in range(N + 1 - x)))


def triangle_basis(p: TriangleHahnParams, order: MonomialOrder | None = None) -> OrthoBasis:
    """Triangle Hahn basis, block k = (phi_{k,0}, phi_{k-1,1}, ..., phi_{0,k})."""
    order = order or MonomialOrder()
    N = p.N
    V = triangle_points(N)
    lam = Staircase(2, tuple((a, b) for a in range(N + 1) for b in range(N + 1 - a)), order)
    W = WeightFn(tuple(triangle_weight(int(x), int(y), p) for x, y in V.points))
    L = MomentFunctional(V, W)
    blocks = tuple(tuple(triangle_hahn(k - mm, mm, p) for mm in range(k + 1)) for k in range(N + 1))
    grams = tuple(block_pairing(L, b, b) for b in blocks)
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(blocks))
    return OrthoBasis(lam, blocks, L, grams, leading)


def univariate_basis(fam: UnivariateFamily) -> OrthoBasis:
    """A univariate family as a basis on its (possibly truncated) support."""
    V = PointSet(1, tuple((x,) for x in fam.nodes))
    L = MomentFunctional(V, WeightFn(fam.weights))
    lam = Staircase(1, tuple((k,) for k in range(fam.degree + 1)))
    blocks = tuple((p,) for p in fam.polys)
    grams = tuple(block_pairing(L, b, b) for b in blocks)
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(blocks))
    return OrthoBasis(lam, blocks, L, grams, leading)


def hahn_basis(p: HahnParams) -> OrthoBasis:
    """Univariate Hahn polynomials as a basis on {0, ..., N}."""
    return univariate_basis(hahn_family(p))


def span_equal(first: Sequence[Poly], second: Sequence[Poly], indices: Sequence) -> bool:
    """Whether two lists of polynomials span the same space (exact ranks)."""
    from .exactlinalg import ratmatrix, rank

    a = ratmatrix([[Fraction(c) for c in p.coefficients(indices)] for p in first], (len(first), len(indices)))
    b = ratmatrix([[Fraction(c) for c in p.coefficients(indices)] for p in second], (len(second), len(indices)))
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(np.vstack([a, b])) == ra
