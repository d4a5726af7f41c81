"""Command-line front end.

Subcommand groups mirror the library modules:

    pirutka  check | search | bad-primes | construct | bound
    complex  subdivide | order | iso | color
    dual     blowup | sequence | reduce
    split    certify | verify | universal | residue | pullback

Exit codes: 0 affirmative/success, 1 negative mathematical verdict (not
Pirutka, nothing found, a check failed), 2 usage error, 3 invalid input
payload, 4 budget or bound exceeded.  Results go to stdout (JSON by
default, ``--format text`` for key/value lines); every error and all
progress reporting goes to stderr as single machine-parseable lines, so
stdout stays pipeable.

Payload-valued flags accept inline JSON or ``@path`` to read a file.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from . import dualcomplex as dc
from . import pirutka as pk
from . import simplicial as sx
from . import splitting as sp
from .errors import BudgetExceededError, InputError, NotPirutkaError, RamsplitError
from .zmodl import IntMatrix, PrimeModulus

__all__ = ["run", "main"]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PAYLOAD = 3
EXIT_BUDGET = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit_error(message: str) -> None:
    print(f"ramsplit: error: {message}", file=sys.stderr)


def _load_payload(value: str):
    """Inline JSON, or @path to a JSON file."""
    text = value
    if value.startswith("@"):
        try:
            with open(value[1:], "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read payload file {value[1:]!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON payload: {exc}") from None


def _matrix_from_args(args) -> pk.PirutkaCandidate:
    if getattr(args, "builtin", None):
        return pk.builtin_matrix(args.builtin)
    data = _load_payload(args.matrix)
    if not isinstance(data, dict) or "entries" not in data:
        raise InputError('matrix JSON must be an object with "entries"')
    entries = data["entries"]
    if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
        raise InputError('"entries" must be an array of integer rows')
    matrix = IntMatrix.from_rows(entries)
    if "n" in data and data["n"] != matrix.rows:
        raise InputError(f'"n" = {data["n"]} does not match {matrix.rows} entry rows')
    if "d" in data and data["d"] != matrix.cols:
        raise InputError(f'"d" = {data["d"]} does not match {matrix.cols} entry columns')
    return pk.PirutkaCandidate(matrix)


def _matrix_to_json(candidate: pk.PirutkaCandidate) -> dict:
    return {
        "n": candidate.n,
        "d": candidate.d,
        "entries": [list(row) for row in candidate.matrix.entries],
    }


def _prime_from_args(args) -> PrimeModulus:
    return PrimeModulus(args.prime)


def _parse_simplex(value: str):
    """JSON array of labels, or comma-separated plain tokens; '' is empty."""
    if value.strip() == "":
        return frozenset()
    try:
        data = json.loads(value)
    except json.JSONDecodeError:
        return frozenset(sx.Original(tok.strip()) for tok in value.split(","))
    if not isinstance(data, list):
        raise InputError("simplex payload must be a JSON array or comma list")
    return frozenset(sx.label_from_json(v) for v in data)


def _parse_index_list(value: str) -> tuple:
    if value.strip() == "":
        return ()
    try:
        return tuple(int(tok) for tok in value.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {value!r}") from None


def _render_text(data, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for k in sorted(data):
            v = data[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(data, list):
        return "\n".join(f"{pad}- {json.dumps(v)}" for v in data) or f"{pad}[]"
    return f"{pad}{json.dumps(data)}"


def _emit(data: dict, fmt: str) -> None:
    if fmt == "text":
        print(_render_text(data))
    else:
        print(json.dumps(data, sort_keys=True, separators=(",", ":")))


def _build_parser() -> _Parser:
    parser = _Parser(prog="ramsplit", description=__doc__)
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, **kwargs):
        p = group.add_parser(name, **kwargs)
        p.add_argument("--format", choices=("json", "text"), default="json")
        return p

    def add_matrix_flags(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--matrix", help="matrix JSON payload or @file")
        g.add_argument("--builtin", help="builtin name: clever3x3, allprimes4x3, stacked:<d>")

    g_pk = top.add_parser("pirutka").add_subparsers(dest="command", required=True)

    p = leaf(g_pk, "check", help="verify the full-rank submatrix property")
    add_matrix_flags(p)
    p.add_argument("--prime", type=int, required=True)

    p = leaf(g_pk, "search", help="exhaustive lexicographic search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--budget", type=int, default=pk.DEFAULT_SEARCH_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--progress", action="store_true")

    p = leaf(g_pk, "bad-primes", help="exact set of failing primes")
    add_matrix_flags(p)
    p.add_argument("--bound", type=int, default=1000)

    p = leaf(g_pk, "construct", help="greedy column-by-column construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)

    p = leaf(g_pk, "bound", help="period-index exponent from builtins")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)

    g_cx = top.add_parser("complex").add_subparsers(dest="command", required=True)

    p = leaf(g_cx, "subdivide", help="star subdivision, or full barycentric")
    p.add_argument("--complex", required=True, dest="complex_payload")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--simplex", help="JSON array or comma tokens; '' for identity")
    mode.add_argument("--barycentric", action="store_true")

    p = leaf(g_cx, "order", help="complex of inclusion flags")
    p.add_argument("--complex", required=True, dest="complex_payload")

    p = leaf(g_cx, "iso", help="check barycentric vs order complex")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--complex", dest="complex_payload")
    src.add_argument("--random", type=int, metavar="N", help="check N random complexes")
    p.add_argument("--seed", type=int, default=0)

    p = leaf(g_cx, "color", help="color an order complex by dimension")
    p.add_argument("--complex", required=True, dest="complex_payload")

    g_du = top.add_parser("dual").add_subparsers(dest="command", required=True)

    p = leaf(g_du, "blowup", help="blow up one stratum")
    p.add_argument("--dual", required=True)
    p.add_argument("--simplex", required=True)

    p = leaf(g_du, "sequence", help="blow up all strata, deepest first")
    p.add_argument("--dual", required=True)

    p = leaf(g_du, "reduce", help="short presentation via coloring")
    p.add_argument("--dual", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--pad", action="store_true", help="pad to exactly dim classes")

    g_sp = top.add_parser("split").add_subparsers(dest="command", required=True)

    p = leaf(g_sp, "certify", help="solve for a splitting certificate")
    add_matrix_flags(p)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--divisors", required=True, help="incident columns J, e.g. 1,2,3")
    p.add_argument("--aux", default="", help="incident auxiliary rows I'")
    p.add_argument("--j0", type=int, required=True)

    p = leaf(g_sp, "verify", help="re-check a certificate")
    add_matrix_flags(p)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--divisors", required=True)
    p.add_argument("--aux", default="")
    p.add_argument("--certificate", required=True, help="certificate JSON or @file")

    p = leaf(g_sp, "universal", help="try certificates for every stratum shape")
    add_matrix_flags(p)
    p.add_argument("--prime", type=int, required=True)

    p = leaf(g_sp, "residue", help="tame residue along one coordinate")
    p.add_argument("--symbol", required=True, help="symbol class JSON or @file")
    p.add_argument("--coord", type=int, required=True)

    p = leaf(g_sp, "pullback", help="kill residues by adjoining roots")
    p.add_argument("--symbol", required=True)
    p.add_argument("--coords", required=True, help="coordinates to adjoin, e.g. 1,2")

    return parser


def _cmd_pirutka(args) -> int:
    if args.command == "check":
        report = pk.is_pirutka(_matrix_from_args(args), _prime_from_args(args))
        payload = {"verdict": report.verdict}
        if not report.verdict:
            payload["witness"] = {
                "J": list(report.witness_cols),
                "I": list(report.witness_rows),
                "rank": report.witness_rank,
            }
        _emit(payload, args.format)
        return EXIT_OK if report.verdict else EXIT_NEGATIVE

    if args.command == "search":
        progress = None
        if args.progress:
            def progress(done, total):
                print(f"ramsplit: search progress {done}/{total} blocks", file=sys.stderr)
        result = pk.exhaustive_search(
            args.n,
            args.d,
            _prime_from_args(args),
            budget=args.budget,
            workers=args.workers,
            progress=progress,
        )
        payload = {
            "found": _matrix_to_json(result.found) if result.found else None,
            "examined": result.examined,
            "pruned": result.pruned,
        }
        _emit(payload, args.format)
        return EXIT_OK if result.found else EXIT_NEGATIVE

    if args.command == "bad-primes":
        result = pk.bad_primes(_matrix_from_args(args), args.bound)
        if result.all_primes:
            payload = {"kind": "all-primes"}
        else:
            payload = {"kind": "finite", "primes": list(result.primes)}
        _emit(payload, args.format)
        return EXIT_OK

    if args.command == "construct":
        found = pk.greedy_construct(args.n, _prime_from_args(args))
        payload = {"found": _matrix_to_json(found) if found else None}
        _emit(payload, args.format)
        return EXIT_OK if found else EXIT_NEGATIVE

    if args.command == "bound":
        result = pk.bound_exponent(_prime_from_args(args), args.dim)
        _emit({"exponent": result.exponent, "matrix": result.matrix_name}, args.format)
        return EXIT_OK

    raise _UsageError(f"unknown pirutka command {args.command!r}")


def _complex_from_args(args) -> sx.SimplicialComplex:
    return sx.complex_from_json(_load_payload(args.complex_payload))


def _cmd_complex(args) -> int:
    if args.command == "subdivide":
        comp = _complex_from_args(args)
        if args.barycentric:
            result = sx.barycentric(comp)
        else:
            result = sx.star_subdivision(comp, _parse_simplex(args.simplex))
        _emit(sx.complex_to_json(result), args.format)
        return EXIT_OK

    if args.command == "order":
        _emit(sx.complex_to_json(sx.order_complex(_complex_from_args(args))), args.format)
        return EXIT_OK

    if args.command == "iso":
        if args.complex_payload is not None:
            report = sx.check_natural_iso(_complex_from_args(args))
            payload = {
                "isomorphic": report.isomorphic,
                "map": [
                    {"from": sx.label_to_json(k), "to": sx.label_to_json(v)}
                    for k, v in sorted(report.vertex_map.items(), key=lambda kv: sx.label_key(kv[0]))
                ],
            }
            if report.counterexample is not None:
                payload["counterexample"] = [
                    sx.label_to_json(v)
                    for v in sorted(report.counterexample, key=sx.label_key)
                ]
            _emit(payload, args.format)
            return EXIT_OK if report.isomorphic else EXIT_NEGATIVE
        rng = random.Random(args.seed)
        checked = 0
        for _ in range(args.random):
            comp = sx.random_complex(rng)
            if not sx.check_natural_iso(comp).isomorphic:  # pragma: no cover
                _emit({"checked": checked, "all_isomorphic": False}, args.format)
                return EXIT_NEGATIVE
            checked += 1
        _emit({"checked": checked, "all_isomorphic": True}, args.format)
        return EXIT_OK

    if args.command == "color":
        report = sx.color_by_dimension(_complex_from_args(args))
        payload = {
            "colors": [
                {"vertex": sx.label_to_json(v), "color": c}
                for v, c in sorted(report.colors.items(), key=lambda kv: sx.label_key(kv[0]))
            ],
            "valid": report.valid,
        }
        _emit(payload, args.format)
        return EXIT_OK if report.valid else EXIT_NEGATIVE

    raise _UsageError(f"unknown complex command {args.command!r}")


def _cmd_dual(args) -> int:
    dual = dc.dual_from_json(_load_payload(args.dual))
    if args.command == "blowup":
        result = dc.blowup(dual, _parse_simplex(args.simplex))
        _emit(dc.dual_to_json(result), args.format)
        return EXIT_OK

    if args.command == "sequence":
        result, trace = dc.stratified_blowup_sequence(dual)
        payload = dc.dual_to_json(result)
        payload["trace"] = [
            {
                "center": [sx.label_to_json(v) for v in sorted(s.center, key=sx.label_key)],
                "vertex": sx.label_to_json(s.exceptional),
            }
            for s in trace
        ]
        _emit(payload, args.format)
        return EXIT_OK

    if args.command == "reduce":
        pres = dc.reduce_presentation(dual, args.dim, pad_to_exact=args.pad)
        _emit(dc.presentation_to_json(pres), args.format)
        return EXIT_OK

    raise _UsageError(f"unknown dual command {args.command!r}")


def _stratum_from_args(args) -> sp.StratumPoint:
    return sp.StratumPoint(
        divisors=frozenset(_parse_index_list(args.divisors)),
        auxiliary=frozenset(_parse_index_list(args.aux)),
    )


def _cmd_split(args) -> int:
    if args.command == "certify":
        candidate = _matrix_from_args(args)
        point = _stratum_from_args(args)
        try:
            cert = sp.find_certificate(candidate, _prime_from_args(args), point, args.j0)
        except NotPirutkaError as exc:
            _emit({"certificate": None, "detail": str(exc)}, args.format)
            return EXIT_NEGATIVE
        _emit(sp.certificate_to_json(cert), args.format)
        return EXIT_OK

    if args.command == "verify":
        candidate = _matrix_from_args(args)
        cert = sp.certificate_from_json(_load_payload(args.certificate))
        point = _stratum_from_args(args)
        outcome = sp.verify_certificate(cert, candidate, _prime_from_args(args), point)
        _emit({"valid": outcome.ok, "reason": outcome.reason}, args.format)
        return EXIT_OK if outcome.ok else EXIT_NEGATIVE

    if args.command == "universal":
        report = sp.universal_split_check(_matrix_from_args(args), _prime_from_args(args))
        payload = {
            "splits": report.ok,
            "checked": report.checked,
            "failures": [
                {
                    "J": list(f.divisors),
                    "j0": f.j0,
                    "I_prime": list(f.auxiliary),
                    "detail": f.detail,
                }
                for f in report.failures
            ],
        }
        _emit(payload, args.format)
        return EXIT_OK if report.ok else EXIT_NEGATIVE

    if args.command == "residue":
        alpha = sp.symbol_class_from_json(_load_payload(args.symbol))
        res = sp.residue_along(alpha, args.coord)
        payload = {
            "units": [{"u": u, "e": e} for u, e in sorted(res.units.items())],
            "coords": [{"i": i, "e": e} for i, e in sorted(res.coords.items())],
            "zero": res.is_zero(),
        }
        _emit(payload, args.format)
        return EXIT_OK

    if args.command == "pullback":
        alpha = sp.symbol_class_from_json(_load_payload(args.symbol))
        coords = _parse_index_list(args.coords)
        result = sp.kummer_pullback(alpha, coords)
        _emit(sp.symbol_class_to_json(result), args.format)
        return EXIT_OK

    raise _UsageError(f"unknown split command {args.command!r}")


_DISPATCH = {
    "pirutka": _cmd_pirutka,
    "complex": _cmd_complex,
    "dual": _cmd_dual,
    "split": _cmd_split,
}


def run(argv) -> int:
    """Parse and dispatch one invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _emit_error(f"usage: {exc}")
        return EXIT_USAGE
    except SystemExit as exc:  # --help paths
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.group](args)
    except _UsageError as exc:
        _emit_error(f"usage: {exc}")
        return EXIT_USAGE
    except BudgetExceededError as exc:
        _emit_error(str(exc))
        return EXIT_BUDGET
    except InputError as exc:
        _emit_error(str(exc))
        return EXIT_PAYLOAD
    except RamsplitError as exc:
        _emit_error(str(exc))
        return EXIT_PAYLOAD


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
