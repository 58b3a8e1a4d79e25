"""Command-line front end.

Exit codes: 0 success, 1 parse or validation error, 2 a search bound was hit
(derivation did not terminate, enumeration incomplete, SAT status unknown).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .analysis import derivation_bound, is_acyclic
from .core import Theory, Variant, validate_theory
from .enumerator import (
    BoundExhausted,
    SearchBounds,
    Strategy,
    derive,
    enumerate_extensions,
    extension_of,
)
from .parser import ParseError, parse_cnf, parse_theory, render_theory
from .render import (
    extension_text,
    extension_to_dict,
    extensions_json,
    matrix_to_dict,
    moves_listing,
    proof_table,
    sort_extensions,
)
from .satenc import SatStatus, decide_sat, encode_3sat

EXIT_OK, EXIT_INPUT, EXIT_BOUND = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}")


def _theory(args) -> Theory:
    text = _read(args.input)
    try:
        t = parse_theory(text, Variant(args.variant) if args.variant else None)
    except ParseError as exc:
        raise InputError(f"{args.input}:{exc}")
    report = validate_theory(t)
    if not report.ok:
        raise InputError("\n".join(f"{args.input}: {v}" for v in report.violations))
    return t


def _cnf(args):
    try:
        return parse_cnf(_read(args.input))
    except ParseError as exc:
        raise InputError(f"{args.input}:{exc}")


def _bounds(args) -> SearchBounds:
    return SearchBounds.from_env(
        max_columns=args.max_columns, max_branches=getattr(args, "max_branches", None)
    )


def _emit(out, text: str) -> None:
    out.write(text)


def cmd_check(args, out) -> int:
    t = _theory(args)
    report = validate_theory(t)
    check = is_acyclic(t)
    if args.format == "json":
        doc = {
            "variant": t.variant.value,
            "violations": list(report.violations),
            "warnings": list(report.warnings),
            "acyclic": check.acyclic,
            "cycle": list(check.cycle) if check.cycle else None,
        }
        if check.acyclic:
            try:
                doc["derivation_bound"] = derivation_bound(t)
            except ValueError as exc:
                doc["derivation_bound"] = None
                doc["bound_note"] = str(exc)
        _emit(out, json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        return EXIT_OK
    lines = [f"variant: {t.variant.value}", "valid: yes"]
    lines += [f"warning: {w}" for w in report.warnings]
    if check.acyclic:
        lines.append("acyclic: yes")
        try:
            lines.append(f"derivation bound: {derivation_bound(t)} rows")
        except ValueError as exc:
            lines.append(f"derivation bound: none ({exc})")
    else:
        lines.append("acyclic: no (cycle " + " -> ".join(check.cycle + check.cycle[:1]) + ")")
    _emit(out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_derive(args, out) -> int:
    t = _theory(args)
    if args.seed is not None and args.strategy != "random":
        raise InputError("--seed only applies to --strategy random")
    try:
        m = derive(
            t,
            Strategy(args.strategy),
            _bounds(args),
            seed=args.seed,
            stagger_facts=args.stagger_facts,
            consume_per_attacker=args.consume_per_attacker,
        )
        code = EXIT_OK
    except BoundExhausted as exc:
        m = exc.matrix
        code = EXIT_BOUND
        check = is_acyclic(t)
        note = f"no terminal state within {exc.bound} columns"
        if not check.acyclic:
            note += "; dependency cycle " + " -> ".join(check.cycle + check.cycle[:1])
        print(f"rsdl: {note}", file=sys.stderr)
    if args.format == "json":
        doc = matrix_to_dict(t, m)
        if code == EXIT_OK:
            doc["extension"] = extension_to_dict(extension_of(m, t))
        _emit(out, json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        _emit(out, proof_table(m) + "\n" + moves_listing(m))
    return code


def cmd_extensions(args, out) -> int:
    t = _theory(args)
    res = enumerate_extensions(
        t,
        _bounds(args),
        stagger_facts=args.stagger_facts,
        consume_per_attacker=args.consume_per_attacker,
        jobs=args.jobs,
    )
    if args.format == "json":
        _emit(out, extensions_json(t, res.extensions, res.complete))
    else:
        exts = sort_extensions(res.extensions)
        _emit(out, f"{len(exts)} extension(s), complete: {'yes' if res.complete else 'no'}\n")
        for k, e in enumerate(exts, start=1):
            _emit(out, extension_text(e, k))
    return EXIT_OK if res.complete else EXIT_BOUND


def cmd_encode_sat(args, out) -> int:
    enc = encode_3sat(_cnf(args))
    _emit(out, render_theory(enc.theory))
    return EXIT_OK


def cmd_decide_sat(args, out) -> int:
    result = decide_sat(_cnf(args), _bounds(args))
    if args.format == "json":
        doc = {"status": result.status.value}
        if result.witness is not None:
            doc["witness"] = extension_to_dict(result.witness)
            doc["assignment"] = result.assignment()
        _emit(out, json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        _emit(out, result.status.value + "\n")
        for atom, value in result.assignment().items():
            _emit(out, f"{atom} = {'true' if value else 'false'}\n")
    return EXIT_BOUND if result.status is SatStatus.UNKNOWN else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsdl", description="Resource-driven substructural defeasible reasoning."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, theory=True):
        p.add_argument("input", help="input file, or - for standard input")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if theory:
            p.add_argument("--variant", choices=[v.value for v in Variant])

    def search(p, branches=True):
        p.add_argument("--max-columns", type=int, default=None,
                       help="column bound (default 10000, or $RSDL_MAX_COLUMNS)")
        if branches:
            p.add_argument("--max-branches", type=int, default=None)
        p.add_argument("--stagger-facts", action="store_true",
                       help="introduce facts one per column instead of all at once")
        p.add_argument("--consume-per-attacker", action="store_true",
                       help="a defending rule pays once for every attacker it beats")

    p = sub.add_parser("check", help="validate a theory and analyse termination")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("derive", help="run one derivation and print its proof table")
    common(p)
    search(p, branches=False)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="first")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("extensions", help="enumerate every reachable extension")
    common(p)
    search(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_extensions)

    p = sub.add_parser("encode-sat", help="encode a 3-CNF file as a theory")
    common(p, theory=False)
    p.set_defaults(func=cmd_encode_sat)

    p = sub.add_parser("decide-sat", help="decide a 3-CNF file through the encoding")
    common(p, theory=False)
    p.add_argument("--max-columns", type=int, default=None)
    p.add_argument("--max-branches", type=int, default=None)
    p.set_defaults(func=cmd_decide_sat)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"rsdl: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"rsdl: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
