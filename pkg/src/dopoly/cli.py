"""Command-line interface: ``dopoly <command> ...``.

Exit codes: 0 success, 1 internal error, 2 malformed input or invalid
parameters, 3 no orthogonal basis exists, 4 recurrence fails the rank
condition, 5 no measure found within the attempt budget, 6 a verification
check failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .errors import (
    DimensionMismatch,
    ExhaustedAttempts,
    ExistenceFailure,
    InsufficientNodes,
    MalformedInput,
    NotNonincreasing,
    RankDeficient,
    ShapeMismatch,
)
from .exactlinalg import format_fraction
from .families import (
    HahnParams,
    MeixnerParams,
    TriangleHahnParams,
    hahn_basis,
    hahn_family,
    meixner_family,
    meixner_truncation,
    product_basis,
    product_recurrence,
    triangle_basis,
    univariate_basis,
)
from .orthogonalize import (
    MomentFunctional,
    OrthoBasis,
    block_pairing,
    check_orthogonality,
    construct_orthogonal,
    leading_matrix,
    orthonormalize,
)
from .recurrence import (
    christoffel_darboux,
    closed_rows,
    commute_check,
    compute_recurrence,
    favard_reconstruct,
    jacobi_operators,
    rank_condition,
    recover_measure,
    verify_three_term,
)
from .staircase import MonomialOrder, compute_staircase

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_EXISTENCE = 3
EXIT_RANK = 4
EXIT_EXHAUSTED = 5
EXIT_VERIFY = 6

INPUT_ERRORS = (MalformedInput, DimensionMismatch, ShapeMismatch, NotNonincreasing, InsufficientNodes, ValueError, OSError)

ALL_CHECKS = ("orthogonality", "three-term", "rank", "cd", "jacobi")
PARTIAL_TOL = 1e-9
CD_PAIR_LIMIT = 64


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    out: str = "-"
    order: MonomialOrder = field(default_factory=MonomialOrder)
    seed: int = 0
    checks: tuple[str, ...] = ALL_CHECKS
    truncation: int | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        inputs = [v for k in ("points", "basis", "weights", "recurrence", "staircase", "spec") if (v := getattr(args, k, None))]
        for path in inputs:
            if path != "-" and not path.lstrip().startswith("{") and not Path(path).exists():
                raise MalformedInput(f"no such file: {path}")
        return cls(args.command, inputs, args.out, _order(args), args.seed, _checks(args.checks), args.truncation)


def _order(args) -> MonomialOrder:
    prec = None
    if args.precedence:
        try:
            prec = tuple(int(v) - 1 for v in args.precedence.split(","))
        except ValueError as exc:
            raise MalformedInput(f"bad precedence {args.precedence!r}") from exc
    try:
        return MonomialOrder(args.order, prec)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc


def _checks(text: str | None) -> tuple[str, ...]:
    if not text:
        return ALL_CHECKS
    picked = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = [c for c in picked if c not in ALL_CHECKS]
    if bad:
        raise MalformedInput(f"unknown checks {bad}; choose from {', '.join(ALL_CHECKS)}")
    return picked


def _emit(obj, out: str) -> None:
    if out == "-":
        sys.stdout.write(io.dumps(obj))
    else:
        io.write_json(out, obj)


def _say(cfg: RunConfig, text: str) -> None:
    # keep stdout clean for JSON when no output file is given
    print(text, file=sys.stderr if cfg.out == "-" else sys.stdout)


def _plain(v):
    if isinstance(v, float):
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (bool, str)) or v is None:
        return v
    try:
        return format_fraction(v)
    except (TypeError, ValueError):
        return float(v)


def load_measure(points_path: str, weights_path: str | None):
    """Point set and weights from a points file plus weights file, or a measure file."""
    obj = io.read_json(points_path)
    if isinstance(obj, dict) and isinstance(obj.get("points"), dict):
        V, W = io.measure_from_json(obj)
        if weights_path:
            W = io.weights_from_json(io.read_json(weights_path), len(V))
        return V, W
    V = io.points_from_json(obj)
    wobj = io.read_json(weights_path) if weights_path else {"uniform": True}
    return V, io.weights_from_json(wobj, len(V))


# ---------------------------------------------------------------- checks


def run_checks(basis: OrthoBasis, L: MomentFunctional, checks=ALL_CHECKS, tol: float | None = None, seed: int = 0) -> dict:
    """Run the selected verification checks and return a JSON-ready report.

    A basis with fewer polynomials than points (a truncated family) does not
    span R[V]: only relations whose products stay in its span are checked,
    the Jacobi check is skipped and a small tolerance is used unless ``tol``
    is given.
    """
    complete = sum(basis.sizes) == len(L.V)
    exact = basis.exact and L.W.exact and complete
    if tol is None:
        tol = 0.0 if exact else PARTIAL_TOL
    grams = tuple(block_pairing(L, b, b) for b in basis.blocks)
    basis = dataclasses.replace(basis, functional=L, gram=grams)
    report: dict = {"complete": complete, "tolerance": tol, "checks": {}}
    needs_rec = {"three-term", "rank", "cd", "jacobi"} & set(checks)
    rec = compute_recurrence(basis, L) if needs_rec else None
    rows = None if complete else closed_rows(basis)
    if rows is not None:
        report["closed_relations"] = len(rows)

    for name in checks:
        if name == "orthogonality":
            r = check_orthogonality(basis.blocks, L, tol=tol)
            sec = {
                "passed": r.passed,
                "max_offdiagonal": _plain(r.max_offdiagonal),
                "singular_blocks": r.singular_blocks,
                "counterexample": None if r.counterexample is None else {"degrees": list(r.counterexample)},
            }
        elif name == "three-term":
            r = verify_three_term(rec, basis, L.V, tol=tol, rows=rows)
            ce = r.counterexample
            if ce is not None:
                ce = {"degree": ce["degree"], "coordinate": ce["coordinate"] + 1, "point": _plain(list(L.V.points[ce["point"]])), "row": ce["row"]}
            sec = {"passed": r.passed, "max_residual": _plain(r.max_residual), "checked": r.checked, "counterexample": ce}
        elif name == "rank":
            ranks = rank_condition(rec)
            bad = next((row for row in ranks if not row["passed"]), None)
            sec = {"passed": bad is None, "degrees": ranks, "counterexample": bad and {"degree": bad["degree"]}}
        elif name == "cd":
            sec = _cd_section(basis, rec, L, tol, seed, rows)
        elif name == "jacobi":
            if not complete:
                sec = {"passed": True, "skipped": "basis does not span R[V]"}
            else:
                c = commute_check(jacobi_operators(rec), tol=tol)
                sec = {"passed": c.passed, "max_entry": _plain(c.max_entry), "counterexample": [[a + 1, b + 1] for a, b in c.pairs] or None}
        report["checks"][name] = sec
    report["passed"] = all(sec["passed"] for sec in report["checks"].values())
    return report


def _cd_section(basis, rec, L, tol, seed, rows=None) -> dict:
    pts = L.V.points
    pairs = [(a, b) for a, b in itertools.permutations(range(len(pts)), 2)]
    if len(pairs) > CD_PAIR_LIMIT:
        pairs = sorted(random.Random(seed).sample(pairs, CD_PAIR_LIMIT))
    worst, where, count = 0, None, 0
    for k in range(rec.top_degree):
        for i in range(basis.dimension):
            # the identity at degree k uses every relation of degree <= k
            if rows is not None and any((j, i, r) not in rows for j in range(k + 1) for r in range(basis.sizes[j])):
                continue
            for a, b in pairs:
                x, y = pts[a], pts[b]
                if x[i] == y[i]:
                    continue
                lhs, rhs = christoffel_darboux(basis, rec, x, y, i, k)
                count += 1
                gap = abs(lhs - rhs)
                if gap > worst:
                    worst = gap
                    if gap > tol and where is None:
                        where = {"degree": k, "coordinate": i + 1, "x": _plain(list(x)), "y": _plain(list(y))}
    return {"passed": worst <= tol, "max_gap": _plain(worst), "checked": count, "counterexample": where}


# ---------------------------------------------------------------- commands


def cmd_staircase(args, cfg: RunConfig) -> int:
    V = io.points_from_json(io.read_json(args.points))
    lam = compute_staircase(V, cfg.order)
    _emit(io.staircase_to_json(lam), cfg.out)
    _say(cfg, "r = " + " ".join(str(r) for r in lam.sizes))
    _say(cfg, f"|Lambda| = {len(lam)}")
    return EXIT_OK


def cmd_construct(args, cfg: RunConfig) -> int:
    V, W = load_measure(args.points, args.weights)
    L = MomentFunctional(V, W)
    lam = io.staircase_from_json(io.read_json(args.staircase)) if args.staircase else compute_staircase(V, cfg.order)
    try:
        basis = construct_orthogonal(L, lam, scale=args.scale == "canonical")
    except ExistenceFailure as exc:
        print(f"no orthogonal basis: moment matrix singular at degree {exc.degree}", file=sys.stderr)
        return EXIT_EXISTENCE
    _emit(io.basis_to_json(basis), cfg.out)
    _say(cfg, f"constructed {len(lam)} polynomials, block sizes {' '.join(map(str, basis.sizes))}")
    if args.orthonormal:
        target = args.orthonormal_out or (_sibling(cfg.out, "orthonormal") if cfg.out != "-" else None)
        if target is None:
            raise MalformedInput("--orthonormal needs --out or --orthonormal-out")
        io.write_json(target, io.basis_to_json(orthonormalize(basis)))
        _say(cfg, f"orthonormal basis written to {target}")
    return EXIT_OK


def _sibling(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix or '.json'}"))


def cmd_verify(args, cfg: RunConfig) -> int:
    basis = io.basis_from_json(io.read_json(args.basis))
    V, W = load_measure(args.points, args.weights)
    if V.dimension != basis.dimension:
        raise MalformedInput("basis and point set dimensions differ")
    report = run_checks(basis, MomentFunctional(V, W), cfg.checks, args.tol, cfg.seed)
    _emit(report, cfg.out)
    for name, sec in report["checks"].items():
        _say(cfg, f"{name}: {'pass' if sec['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_recurrence(args, cfg: RunConfig) -> int:
    basis = io.basis_from_json(io.read_json(args.basis))
    V, W = load_measure(args.points, args.weights)
    L = MomentFunctional(V, W)
    rec = compute_recurrence(dataclasses.replace(basis, functional=L), L)
    _emit(io.recurrence_to_json(rec), cfg.out)
    for row in rank_condition(rec):
        _say(cfg, f"k={row['degree']}: rank A={row['rank_A']} rank C={row['rank_C']} r_next={row['r_next']}")
    return EXIT_OK


def cmd_favard(args, cfg: RunConfig) -> int:
    rec = io.recurrence_from_json(io.read_json(args.recurrence))
    lam = io.staircase_from_json(io.read_json(args.staircase))
    bad = [row for row in rank_condition(rec) if not row["passed"]]
    if bad:
        print(f"rank condition fails at degree {bad[0]['degree']}", file=sys.stderr)
        return EXIT_RANK
    cands = io.points_from_json(io.read_json(args.candidates)) if args.candidates else None
    ref = io.points_from_json(io.read_json(args.reference)) if args.reference else cands
    try:
        blocks = favard_reconstruct(rec, lam, reference=ref)
        V, W = recover_measure(blocks, cands, seed=cfg.seed, attempts=args.attempts)
    except RankDeficient as exc:
        print(f"rank deficient recurrence at degree {exc.degree}", file=sys.stderr)
        return EXIT_RANK
    except ExhaustedAttempts as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_EXHAUSTED
    L = MomentFunctional(V, W)
    grams = tuple(block_pairing(L, b, b) for b in blocks)
    leading = tuple(leading_matrix(b, lam, k) for k, b in enumerate(blocks))
    basis = OrthoBasis(lam, blocks, L, grams, leading)
    _emit(io.basis_to_json(basis), cfg.out)
    measure_out = args.measure_out or (_sibling(cfg.out, "measure") if cfg.out != "-" else None)
    if measure_out:
        io.write_json(measure_out, io.measure_to_json(V, W))
    check = check_orthogonality(blocks, L, tol=0.0 if basis.exact and W.exact else PARTIAL_TOL)
    _say(cfg, f"recovered {len(V)} points; orthogonality {'pass' if check.passed else 'FAIL'}")
    return EXIT_OK if check.passed else EXIT_VERIFY


def _family_basis(spec: dict, truncation: int | None):
    kind = spec.get("family")
    if kind == "hahn":
        return hahn_basis(HahnParams(spec["a"], spec["b"], spec["N"])), None
    if kind == "meixner":
        return univariate_basis(_univariate(spec, truncation)), None
    if kind == "triangle":
        s = spec["sigma"]
        if not isinstance(s, list) or len(s) != 3:
            raise ValueError("sigma must list three parameters")
        return triangle_basis(TriangleHahnParams(s[0], s[1], s[2], spec["N"])), None
    if kind == "product":
        fx = _univariate(spec["x"], truncation)
        fy = _univariate(spec["y"], truncation)
        rec = product_recurrence(fx, fy) if fx.name == fy.name == "hahn" else None
        return product_basis(fx, fy), rec
    raise ValueError(f"unknown family {kind!r}")


def _univariate(spec: dict, truncation: int | None):
    kind = spec.get("family")
    if kind == "hahn":
        return hahn_family(HahnParams(spec["a"], spec["b"], spec["N"]))
    if kind == "meixner":
        p = MeixnerParams(spec["b"], spec["c"])
        T = spec.get("truncation", truncation)
        T = meixner_truncation(p) if T is None else int(T)
        degree = int(spec.get("degree", 2))
        if not 0 <= degree <= T:
            raise ValueError("Meixner degree must lie in 0..truncation")
        return meixner_family(p, degree, T)
    raise ValueError(f"unknown univariate family {kind!r}")


def cmd_family(args, cfg: RunConfig) -> int:
    text = args.spec
    try:
        spec = json.loads(text) if text.lstrip().startswith("{") else io.read_json(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"bad family spec: {exc}") from exc
    if not isinstance(spec, dict):
        raise MalformedInput("family spec must be a JSON object")
    try:
        basis, rec = _family_basis(spec, cfg.truncation)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"invalid family parameters: {exc}") from exc
    _emit(io.basis_to_json(basis), cfg.out)
    L = basis.functional
    measure_out = args.measure_out or (_sibling(cfg.out, "measure") if cfg.out != "-" else None)
    if measure_out:
        io.write_json(measure_out, io.measure_to_json(L.V, L.W))
    if rec is not None and args.recurrence_out:
        io.write_json(args.recurrence_out, io.recurrence_to_json(rec))
    _say(cfg, f"{spec['family']}: {sum(basis.sizes)} polynomials on {len(L.V)} points")
    return EXIT_OK


COMMANDS = {
    "staircase": cmd_staircase,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "recurrence": cmd_recurrence,
    "favard": cmd_favard,
    "family": cmd_family,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", choices=("grlex", "grevlex"), default="grevlex", help="graded monomial order")
    common.add_argument("--precedence", help="variable precedence, e.g. 2,1 to rank y before x")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="-", help="output JSON path (default stdout)")
    common.add_argument("--checks", help=f"comma list from {','.join(ALL_CHECKS)} (default all)")
    common.add_argument("--truncation", type=int, help="support cutoff for Meixner families")

    parser = argparse.ArgumentParser(prog="dopoly", description="Discrete orthogonal polynomials on finite point sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("staircase", parents=[common], help="staircase of a point set")
    p.add_argument("points")

    p = sub.add_parser("construct", parents=[common], help="exact orthogonal basis")
    p.add_argument("points", help="point-set file or measure file")
    p.add_argument("weights", nargs="?", help="weight file (default uniform)")
    p.add_argument("--staircase", help="use this staircase instead of computing one")
    p.add_argument("--scale", choices=("canonical", "raw"), default="canonical")
    p.add_argument("--orthonormal", action="store_true", help="also write the float orthonormal basis")
    p.add_argument("--orthonormal-out")

    p = sub.add_parser("verify", parents=[common], help="verification suite")
    p.add_argument("basis")
    p.add_argument("points", help="point-set file or measure file")
    p.add_argument("weights", nargs="?")
    p.add_argument("--tol", type=float, help="absolute tolerance (default 0 for exact complete bases)")

    p = sub.add_parser("recurrence", parents=[common], help="extract A, B, C blocks")
    p.add_argument("basis")
    p.add_argument("points", help="point-set file or measure file")
    p.add_argument("weights", nargs="?")

    p = sub.add_parser("favard", parents=[common], help="basis and measure from recurrence data")
    p.add_argument("recurrence")
    p.add_argument("staircase")
    p.add_argument("--candidates", help="point-set file to draw support points from")
    p.add_argument("--reference", help="point set used to reduce products (default: candidates)")
    p.add_argument("--attempts", type=int, default=64)
    p.add_argument("--measure-out")

    p = sub.add_parser("family", parents=[common], help="closed-form Hahn, Meixner and triangle bases")
    p.add_argument("spec", help='JSON file or inline JSON such as {"family": "hahn", "a": 0, "b": 0, "N": 3}')
    p.add_argument("--measure-out")
    p.add_argument("--recurrence-out", help="for Hahn products, write the explicit recurrence")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](args, cfg)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
