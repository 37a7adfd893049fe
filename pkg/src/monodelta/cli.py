"""Command-line interface: ``monodelta <subcommand> ...``.

Exit status is 0 on success, 1 when the analysis finds a problem (ambiguity,
non-equivalence, a failing fuzz seed, a generation error) and 2 on usage or
parse errors.  ``MONODELTA_FORMAT=json`` makes ``--json`` the default.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .analysis import classify, op_kind, project, remove_empty_deltas
from .generation import GenerationError, InvalidProductError, check_unambiguity, enumerate_products, generate_variant
from .model import SplError, ValidationError
from .oracle import RandomSplSpec, check_equivalence, generate_random_spl, outcome_table
from .refactor import refactor_decreasing, refactor_increasing
from .syntax import SplSyntaxError, parse_formula, parse_spl, print_program, print_spl

OK, FINDINGS, USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, status: int = USAGE):
        super().__init__(message)
        self.status = status


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None
    try:
        return parse_spl(text)
    except SplSyntaxError as exc:
        raise CliError(f"{path}:{exc}") from None
    except ValidationError as exc:
        raise CliError(f"{path}: {exc}") from None


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    elif text:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _show_product(pl, p) -> str:
    return "{" + ", ".join(f for f in pl.features if f in p) + "}"


def _refactor(pl, direction: str):
    return refactor_increasing(pl) if direction == "inc" else refactor_decreasing(pl)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    pl = _load(args.file)
    report = check_unambiguity(pl)
    text = "ok" if report.ok else "ambiguous\n" + "\n".join(f"  {c}" for c in report.conflicts)
    _emit(args, report.to_dict(), text)
    return OK if report.ok else FINDINGS


def cmd_products(args) -> int:
    pl = _load(args.file)
    products = enumerate_products(pl)
    lines = [_show_product(pl, p) for p in products]
    _emit(args, {"products": [[f for f in pl.features if f in p] for p in products]}, "\n".join(lines))
    return OK


def _parse_product(pl, spec: str) -> frozenset:
    names = [n.strip() for n in spec.split(",") if n.strip()]
    unknown = [n for n in names if n not in pl.features]
    if unknown:
        raise CliError(f"unknown feature {unknown[0]}")
    return frozenset(names)


def cmd_generate(args) -> int:
    pl = _load(args.file)
    product = _parse_product(pl, args.product)
    try:
        variant = generate_variant(pl, product)
    except InvalidProductError as exc:
        raise CliError(str(exc)) from None
    except GenerationError as exc:
        raise CliError(f"{args.file}: {exc}", FINDINGS) from None
    text = print_program(variant.program)
    _emit(args, {"product": sorted(product), "program": text}, text)
    return OK


def cmd_classify(args) -> int:
    pl = _load(args.file)
    report = classify(pl)
    _emit(args, report.to_dict(), report.to_text())
    return OK


def cmd_refactor(args) -> int:
    pl = _load(args.file)
    report = check_unambiguity(pl)
    if not report.ok:
        raise CliError(f"{args.file}: ambiguous product line, refusing to refactor: {report.conflicts[0]}", FINDINGS)
    out = _refactor(pl, args.direction)
    if args.cleanup:
        out = remove_empty_deltas(out)
    text = print_spl(out)
    if args.json:
        if args.output:
            _write(text, args.output)
        _emit(args, {"direction": args.direction, "output": args.output, "spl": text}, "")
    else:
        _write(text, args.output)
    return OK


def cmd_project(args) -> int:
    pl = _load(args.file)
    try:
        keep = parse_formula(args.keep, pl.features)
    except SplSyntaxError as exc:
        raise CliError(f"--keep: {exc}") from None
    out = project(pl, keep)
    text = print_spl(out)
    if args.json:
        if args.output:
            _write(text, args.output)
        dropped = sorted(set(pl.delta_names) - set(out.delta_names))
        _emit(args, {"dropped": dropped, "output": args.output, "spl": text}, "")
    else:
        _write(text, args.output)
    return OK


def cmd_equiv(args) -> int:
    a, b = _load(args.first), _load(args.second)
    verdict = check_equivalence(a, b)
    _emit(args, verdict.to_dict(), verdict.to_text())
    return OK if verdict.equivalent else FINDINGS


def _expected_class(pl, direction: str) -> str:
    kinds = [op_kind(o) for _, o in pl.all_ops() if o.op.value == "modifies"]
    if direction == "inc":
        if not kinds:
            return "strictly-increasing"
        return "increasing" if all(k == "wraps" for k in kinds) else "pseudo-increasing"
    if not kinds:
        return "readd-strictly-decreasing"
    return "readd-decreasing" if all(k == "voids" for k in kinds) else "readd-pseudo-decreasing"


def cmd_fuzz(args) -> int:
    if args.count < 0:
        raise CliError("--count must not be negative")
    directions = ["inc", "dec"] if args.direction == "both" else [args.direction]
    failure = None
    checked = 0
    for seed in range(args.seed, args.seed + args.count):
        pl = generate_random_spl(RandomSplSpec(seed=seed))
        table = outcome_table(pl)
        for d in directions:
            out = _refactor(pl, d)
            verdict = check_equivalence(pl, out, table_a=table)
            expected = _expected_class(pl, d)
            if not verdict.equivalent:
                failure = {"seed": seed, "direction": d, "reason": verdict.to_text()}
            elif not classify(out)[expected]:
                failure = {"seed": seed, "direction": d, "reason": f"output is not {expected}"}
            if failure:
                break
        if failure:
            break
        checked += 1
    doc = {"checked": checked, "failure": failure}
    if failure:
        text = f"seed {failure['seed']} ({failure['direction']}): {failure['reason']}"
    else:
        text = f"{checked} product lines ok"
    _emit(args, doc, text)
    return FINDINGS if failure else OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    default_json = os.environ.get("MONODELTA_FORMAT", "").lower() == "json"
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="json", action="store_true", default=default_json,
                     help="emit one JSON document")
    fmt.add_argument("--text", dest="json", action="store_false", help="emit plain text")

    parser = argparse.ArgumentParser(prog="monodelta", description="Delta-oriented product line toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", parents=[common], help="validate and check unambiguity")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("products", parents=[common], help="list all products")
    p.add_argument("file")
    p.set_defaults(run=cmd_products)

    p = sub.add_parser("generate", parents=[common], help="print the variant of one product")
    p.add_argument("file")
    p.add_argument("--product", required=True, help="comma separated feature names")
    p.set_defaults(run=cmd_generate)

    p = sub.add_parser("classify", parents=[common], help="report monotonicity classes")
    p.add_argument("file")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("refactor", parents=[common], help="refactor into a monotonic product line")
    p.add_argument("file")
    p.add_argument("--direction", choices=["inc", "dec"], required=True)
    p.add_argument("--cleanup", action="store_true", help="drop empty delta modules afterwards")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.set_defaults(run=cmd_refactor)

    p = sub.add_parser("project", parents=[common], help="restrict to the products satisfying a formula")
    p.add_argument("file")
    p.add_argument("--keep", required=True, help="formula over the features")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.set_defaults(run=cmd_project)

    p = sub.add_parser("equiv", parents=[common], help="compare two product lines variant by variant")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("fuzz", parents=[common], help="differential test of the refactorings")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--direction", choices=["inc", "dec", "both"], default="both")
    p.set_defaults(run=cmd_fuzz)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return args.run(args)
    except CliError as exc:
        print(f"monodelta: {exc}", file=sys.stderr)
        return exc.status
    except SplError as exc:
        print(f"monodelta: {exc}", file=sys.stderr)
        return FINDINGS


def main() -> None:
    sys.exit(run())
