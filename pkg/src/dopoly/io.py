"""JSON encoding of point sets, weights, staircases, bases and recurrences.

Rationals are written as bare integers or ``"p/q"`` strings and read back
losslessly.  Floats are accepted only in bases, Gram blocks and weights
(the orthonormal path).  Writes go to a temporary file in the target
directory and are renamed into place.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DopolyError, MalformedInput
from .exactlinalg import format_fraction, to_fraction
from .orthogonalize import OrthoBasis, WeightFn, leading_matrix
from .poly import Poly
from .recurrence import Recurrence
from .staircase import MonomialOrder, PointSet, Staircase


def encode_scalar(v):
    if isinstance(v, float):
        return v
    return format_fraction(v)


def decode_scalar(v, allow_float: bool = False):
    if isinstance(v, float):
        if allow_float:
            return v
        raise MalformedInput(f"float {v!r} where an exact rational is required")
    try:
        return to_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad rational {v!r}") from exc


def encode_matrix(M) -> list:
    return [[encode_scalar(v) for v in row] for row in np.asarray(M)]


def decode_matrix(rows, shape: tuple[int, int] | None = None, allow_float: bool = False) -> np.ndarray:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise MalformedInput("matrix must be a list of rows")
    vals = [[decode_scalar(v, allow_float) for v in r] for r in rows]
    if shape is None:
        shape = (len(vals), len(vals[0]) if vals else 0)
    if shape[1] == 0:
        vals = [[] for _ in range(shape[0])]
    if len(vals) != shape[0] or any(len(r) != shape[1] for r in vals):
        raise MalformedInput(f"matrix does not have shape {shape}")
    isfloat = any(isinstance(v, float) for r in vals for v in r)
    out = np.empty(shape, dtype=float if isfloat else object)
    for i, r in enumerate(vals):
        for j, v in enumerate(r):
            out[i, j] = v
    return out


def index_key(alpha) -> str:
    return "(" + ",".join(str(e) for e in alpha) + ")"


def parse_index_key(key: str) -> tuple[int, ...]:
    s = key.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise MalformedInput(f"bad exponent key {key!r}")
    try:
        return tuple(int(e) for e in s[1:-1].split(",") if e.strip())
    except ValueError as exc:
        raise MalformedInput(f"bad exponent key {key!r}") from exc


def _field(obj: dict, name: str):
    if not isinstance(obj, dict) or name not in obj:
        raise MalformedInput(f"missing field {name!r}")
    return obj[name]


# ---------------------------------------------------------------- encoders


def points_to_json(V: PointSet) -> dict:
    return {"dimension": V.dimension, "points": [[format_fraction(c) for c in p] for p in V.points]}


def weights_to_json(W: WeightFn) -> dict:
    return {"values": [encode_scalar(v) for v in W.values]}


def order_to_json(order: MonomialOrder) -> dict:
    return {"order": order.kind, "precedence": list(order.precedence) if order.precedence else None}


def staircase_to_json(lam: Staircase) -> dict:
    out = order_to_json(lam.order)
    out["dimension"] = lam.dimension
    out["indices"] = [list(a) for a in lam.indices]
    return out


def poly_to_json(p: Poly, lam: Staircase | None = None) -> dict:
    keys = lam.order.sort(p.terms) if lam is not None else sorted(p.terms, key=lambda a: (sum(a), a))
    return {"coeffs": {index_key(a): encode_scalar(p.terms[a]) for a in keys}}


def basis_to_json(basis: OrthoBasis) -> dict:
    lam = basis.staircase
    return {
        "staircase": staircase_to_json(lam),
        "blocks": [[poly_to_json(p, lam) for p in block] for block in basis.blocks],
        "gram": [encode_matrix(H) for H in basis.gram],
    }


def recurrence_to_json(rec: Recurrence) -> dict:
    return {
        "d": rec.dimension,
        "r": list(rec.sizes),
        "blocks": {
            name: [[encode_matrix(M) for M in per_k] for per_k in getattr(rec, name)]
            for name in ("A", "B", "C")
        },
    }


def measure_to_json(V: PointSet, W: WeightFn) -> dict:
    return {"points": points_to_json(V), "weights": weights_to_json(W)}


# ---------------------------------------------------------------- decoders


def points_from_json(obj) -> PointSet:
    d = _field(obj, "dimension")
    pts = _field(obj, "points")
    if not isinstance(d, int) or d < 1 or not isinstance(pts, list) or not pts:
        raise MalformedInput("point set needs a positive dimension and a nonempty list of points")
    try:
        return PointSet(d, tuple(tuple(decode_scalar(c) for c in p) for p in pts))
    except DopolyError:
        raise
    except (TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from exc


def weights_from_json(obj, n: int) -> WeightFn:
    if isinstance(obj, dict) and obj.get("uniform") is True:
        return WeightFn.uniform(n)
    vals = _field(obj, "values")
    if not isinstance(vals, list) or len(vals) != n:
        raise MalformedInput(f"expected {n} weights")
    try:
        return WeightFn(tuple(decode_scalar(v, allow_float=True) for v in vals))
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc


def order_from_json(obj) -> MonomialOrder:
    kind = obj.get("order", "grevlex") if isinstance(obj, dict) else "grevlex"
    prec = obj.get("precedence") if isinstance(obj, dict) else None
    try:
        return MonomialOrder(kind, tuple(prec) if prec else None)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from exc


def staircase_from_json(obj) -> Staircase:
    idx = _field(obj, "indices")
    if not isinstance(idx, list) or not idx:
        raise MalformedInput("staircase needs a nonempty index list")
    d = obj.get("dimension", len(idx[0]))
    try:
        return Staircase(d, tuple(tuple(a) for a in idx), order_from_json(obj))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from exc


def poly_from_json(obj, dim: int) -> Poly:
    coeffs = _field(obj, "coeffs")
    if not isinstance(coeffs, dict):
        raise MalformedInput("coeffs must be an object")
    terms = {}
    for k, v in coeffs.items():
        alpha = parse_index_key(k)
        if len(alpha) != dim:
            raise MalformedInput(f"exponent {k} in dimension {dim}")
        terms[alpha] = decode_scalar(v, allow_float=True)
    return Poly(dim, terms)


def basis_from_json(obj) -> OrthoBasis:
    lam = staircase_from_json(_field(obj, "staircase"))
    raw = _field(obj, "blocks")
    if not isinstance(raw, list):
        raise MalformedInput("blocks must be a list")
    blocks = tuple(tuple(poly_from_json(p, lam.dimension) for p in b) for b in raw)
    grams_raw = obj.get("gram")
    if grams_raw is None:
        grams = tuple(None for _ in blocks)
    else:
        if len(grams_raw) != len(blocks):
            raise MalformedInput("one gram block per degree block expected")
        grams = tuple(decode_matrix(g, (len(b), len(b)), allow_float=True) for g, b in zip(grams_raw, blocks))
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(blocks))
    return OrthoBasis(lam, blocks, None, grams, leading)


def recurrence_from_json(obj) -> Recurrence:
    d = _field(obj, "d")
    r = _field(obj, "r")
    blocks = _field(obj, "blocks")
    if not isinstance(d, int) or not isinstance(r, list) or not all(isinstance(v, int) for v in r):
        raise MalformedInput("recurrence needs integer d and r")
    n = len(r) - 1

    def load(name, count, rows, cols):
        data = _field(blocks, name)
        if len(data) != count or any(len(per_k) != d for per_k in data):
            raise MalformedInput(f"{name} must hold {count} degrees of {d} matrices")
        return tuple(
            tuple(decode_matrix(M, (rows(k), cols(k)), allow_float=True) for M in per_k)
            for k, per_k in enumerate(data)
        )

    A = load("A", n, lambda k: r[k], lambda k: r[k + 1])
    B = load("B", n + 1, lambda k: r[k], lambda k: r[k])
    C = load("C", n + 1, lambda k: r[k], lambda k: r[k - 1] if k else 0)
    try:
        return Recurrence(d, tuple(r), A, B, C)
    except DopolyError as exc:
        raise MalformedInput(str(exc)) from exc


def measure_from_json(obj) -> tuple[PointSet, WeightFn]:
    V = points_from_json(_field(obj, "points"))
    return V, weights_from_json(_field(obj, "weights"), len(V))


# ---------------------------------------------------------------- files


def _is_flat(obj) -> bool:
    return isinstance(obj, list) and all(not isinstance(v, (list, dict)) for v in obj)


def _format(obj: Any, level: int) -> str:
    pad = "  " * (level + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{pad}{json.dumps(str(k))}: {_format(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, list) and obj and not _is_flat(obj):
        if all(_is_flat(v) for v in obj):
            items = [pad + json.dumps(v, ensure_ascii=False) for v in obj]
        else:
            items = [pad + _format(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj: Any) -> str:
    """JSON text with scalar lists (points, indices, matrix rows) kept on one line."""
    return _format(_native(obj), 0) + "\n"


def _native(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _native(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_native(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    return obj


def write_json(path: str | os.PathLike, obj: Any) -> None:
    """Atomically write ``obj`` as JSON to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(dumps(obj))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: str | os.PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
