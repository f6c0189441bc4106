"""Exact rational matrices and the dense kernels built on them.

Matrices are numpy arrays of ``dtype=object`` holding ``fractions.Fraction``
entries, so ``@``, ``.T``, slicing and stacking come from numpy while every
arithmetic operation stays exact.  Elimination routines work on integer rows
(each row cleared of denominators) with Bareiss' fraction-free update.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import PivotBreakdown, RankDeficient, ShapeMismatch, SingularMatrix

Rational = Fraction


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction, or ``"p/q"`` string into a Fraction.

    Floats are rejected: exact inputs only.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(value) -> int | str:
    """Render an exact scalar as a bare int or a ``"p/q"`` string."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def ratmatrix(rows: Iterable[Sequence], shape: tuple[int, int] | None = None) -> np.ndarray:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    out = np.empty(shape, dtype=object)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ShapeMismatch(f"rows do not match shape {shape}")
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = to_fraction(v)
    return out


def zeros(r: int, c: int) -> np.ndarray:
    out = np.empty((r, c), dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def as_exact(M: np.ndarray) -> np.ndarray:
    """Coerce entries (ints left over from empty matmuls etc.) to Fraction."""
    M = np.asarray(M, dtype=object)
    out = np.empty(M.shape, dtype=object)
    for idx, v in np.ndenumerate(M):
        out[idx] = Fraction(v)
    return out


def is_zero(M: np.ndarray) -> bool:
    return all(v == 0 for v in np.asarray(M).flat)


def _integer_rows(M: np.ndarray) -> list[list[int]]:
    rows = []
    for r in np.asarray(M, dtype=object):
        fr = [Fraction(v) for v in r]
        scale = math.lcm(*(v.denominator for v in fr)) if fr else 1
        rows.append([int(v * scale) for v in fr])
    return rows


def _bareiss(rows: list[list[int]], ncols: int | None = None) -> tuple[list[list[int]], list[int], int]:
    """In-place fraction-free row echelon form.

    Eliminates only within the first ``ncols`` columns (all by default).
    Returns the rows, the pivot columns, and the sign of the row permutation.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    ncols = n if ncols is None else ncols
    prev = 1
    sign = 1
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        piv = rows[r][c]
        for i in range(r + 1, m):
            ric = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c + 1, n):
                row_i[j] = (row_i[j] * piv - ric * row_r[j]) // prev
            row_i[c] = 0
        # rows above r keep their entries; only the trailing block is updated
        prev = piv
        pivots.append(c)
        r += 1
    return rows, pivots, sign


def rank(M: np.ndarray) -> int:
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    _, pivots, _ = _bareiss(_integer_rows(M))
    return len(pivots)


def det(M: np.ndarray) -> Fraction:
    M = np.asarray(M, dtype=object)
    n, m = M.shape
    if n != m:
        raise ShapeMismatch("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for r in M:
        fr = [Fraction(v) for v in r]
        s = math.lcm(*(v.denominator for v in fr))
        scale *= s
        rows.append([int(v * s) for v in fr])
    rows, pivots, sign = _bareiss(rows)
    if len(pivots) < n:
        return Fraction(0)
    return Fraction(sign * rows[-1][-1]) / scale


def solve(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Return X with ``M @ X == B`` exactly."""
    M = np.asarray(M, dtype=object)
    B = np.asarray(B, dtype=object)
    vector = B.ndim == 1
    if vector:
        B = B.reshape(-1, 1)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n or B.shape[0] != n:
        raise ShapeMismatch(f"cannot solve {M.shape} against {B.shape}")
    k = B.shape[1]
    if n == 0:
        X = zeros(0, k)
        return X.reshape(-1) if vector else X
    aug = _integer_rows(np.hstack([M, B]))
    aug, pivots, _ = _bareiss(aug, ncols=n)
    if len(pivots) < n:
        raise SingularMatrix("matrix is singular")
    X = zeros(n, k)
    for col in range(k):
        for i in range(n - 1, -1, -1):
            acc = Fraction(aug[i][n + col])
            for j in range(i + 1, n):
                acc -= aug[i][j] * X[j, col]
            X[i, col] = acc / aug[i][i]
    return X.reshape(-1) if vector else X


def inverse(M: np.ndarray) -> np.ndarray:
    return solve(M, identity(np.asarray(M).shape[0]))


def symmetric_factor(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a symmetric matrix as ``S @ D @ S.T``.

    S is unit lower triangular and D diagonal.  No pivoting is performed, so a
    vanishing leading principal minor raises :class:`PivotBreakdown` with the
    index of the offending pivot.  A zero final pivot is allowed (nothing is
    left to eliminate).
    """
    M = as_exact(M)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ShapeMismatch("symmetric_factor needs a square matrix")
    if any(M[i, j] != M[j, i] for i in range(n) for j in range(i)):
        raise ValueError("matrix is not symmetric")
    S = identity(n)
    d = [Fraction(0)] * n
    for j in range(n):
        d[j] = M[j, j] - sum((S[j, k] ** 2 * d[k] for k in range(j)), Fraction(0))
        if j == n - 1:
            break
        if d[j] == 0:
            raise PivotBreakdown(j)
        for i in range(j + 1, n):
            acc = M[i, j] - sum((S[i, k] * S[j, k] * d[k] for k in range(j)), Fraction(0))
            S[i, j] = acc / d[j]
    D = zeros(n, n)
    for i in range(n):
        D[i, i] = d[i]
    return S, D


def independent_rows(A: np.ndarray) -> list[int]:
    """Greedy top-to-bottom choice of a maximal independent row set."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []  # reduced rows, each with a leading pivot
    leads: list[int] = []
    for i, row in enumerate(np.asarray(A, dtype=object)):
        v = [Fraction(x) for x in row]
        for b, c in zip(basis, leads):
            if v[c] != 0:
                f = v[c] / b[c]
                v = [x - f * y for x, y in zip(v, b)]
        lead = next((c for c, x in enumerate(v) if x != 0), None)
        if lead is None:
            continue
        chosen.append(i)
        basis.append(v)
        leads.append(lead)
    return chosen


def left_inverse(A: np.ndarray) -> np.ndarray:
    """Deterministic left inverse of a full-column-rank matrix.

    The first maximal set of independent rows (scanning top to bottom) forms a
    square block; its inverse is scattered into those row positions and every
    other column of the result is zero.
    """
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    rows = independent_rows(A)
    if len(rows) < n:
        raise RankDeficient(f"rank {len(rows)} < {n} columns")
    rows = rows[:n]
    sub_inv = inverse(A[rows, :])
    out = zeros(n, m)
    for j, r in enumerate(rows):
        out[:, r] = sub_inv[:, j]
    return out
