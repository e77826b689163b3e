"""Command line entry point: ``szpiro-bounds {compute,verify,derive-constants,generate}``.

Exit codes: 0 success, 1 internal error, 2 invalid input.  A computed
inequality that fails is still a successful run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import arith
from .errors import DescriptorError, DomainError, SzpiroError
from .expectation import DEFAULT_BUDGET
from .global_model import descriptor_warnings, parse_descriptor, serialize
from .report import reports_json, reports_markdown
from .synthetic import generate
from .szpiro import (all_reports, baby_report, derive_constants, explicit_report, probabilistic_report,
                     tautological_report)
from .verify import SUITES, run

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2

INEQUALITIES = ("probabilistic", "baby", "explicit", "tautological", "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="szpiro-bounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate inequalities on a descriptor")
    c.add_argument("--input", required=True, type=Path, help="descriptor JSON file")
    c.add_argument("--inequality", choices=INEQUALITIES, default="all")
    c.add_argument("--format", choices=("json", "md"), default="md",
                   help="md writes a JSON sidecar next to --out")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on enumerated tuple evaluations")
    c.add_argument("--precision", type=int, default=arith.PRECISION_DIGITS, help="decimal digits")
    c.add_argument("--out", type=Path, help="output file (stdout when omitted)")

    v = sub.add_parser("verify", help="run the self-check suites")
    v.add_argument("--suite", choices=sorted(SUITES), action="append",
                   help="suite to run; repeatable; default all")
    v.add_argument("--verbose", action="store_true", help="print every check")

    d = sub.add_parser("derive-constants", help="recompute A0, B0, B and eps")
    d.add_argument("--l", type=int, required=True)
    d.add_argument("--d0", type=int, required=True)

    g = sub.add_parser("generate", help="write a seeded synthetic descriptor")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--d0", type=int, required=True)
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--fibers", type=int, default=3)
    g.add_argument("--max-places", type=int)
    g.add_argument("--out", type=Path)
    return parser


def _compute_reports(desc, kind: str, budget: int):
    if kind == "all":
        return all_reports(desc, budget)
    fn = {
        "probabilistic": probabilistic_report,
        "baby": baby_report,
        "explicit": explicit_report,
        "tautological": lambda d: tautological_report(d, budget),
    }[kind]
    return {kind: fn(desc)}


def cmd_compute(args) -> int:
    arith.set_precision(args.precision)
    try:
        desc = parse_descriptor(args.input.read_text())
    except DescriptorError as exc:
        print(f"invalid descriptor [{exc.invariant}]: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for w in descriptor_warnings(desc):
        print(f"warning: {w}", file=sys.stderr)
    try:
        reports = _compute_reports(desc, args.inequality, args.budget)
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    meta = {"input": args.input.name, "l": desc.l, "d0": desc.d0, "budget": args.budget,
            "precision": args.precision}
    js = reports_json(reports, meta)
    if args.format == "json":
        text = js
    else:
        text = reports_markdown(reports, meta)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        if args.format == "md":
            args.out.with_suffix(".json").write_text(js)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run(args.suite)
    failed = 0
    for name, checks in results.items():
        bad = [c for c in checks if not c.passed and not c.informational]
        failed += len(bad)
        print(f"{'PASS' if not bad else 'FAIL'} {name}: {len(checks) - len(bad)}/{len(checks)}")
        for c in checks:
            if args.verbose or (not c.passed and not c.informational):
                print(f"  {'ok ' if c.passed else 'BAD'} {c.name} {c.detail}".rstrip())
            elif c.informational:
                print(f"  info {c.name}: {c.detail}")
    return EXIT_OK if not failed else EXIT_INTERNAL


def cmd_derive_constants(args) -> int:
    c = derive_constants(args.l, args.d0)
    for line in c.trace:
        print(line)
    print(f"A0 within relative 1e-4 of the published value: {c.A0_matches}")
    print(f"B0 equal to the published value: {c.B0_matches}")
    return EXIT_OK


def cmd_generate(args) -> int:
    print(f"seed {args.seed}", file=sys.stderr)
    desc = generate(args.seed, args.d0, args.l, args.fibers, args.max_places)
    text = serialize(desc)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "derive-constants": cmd_derive_constants,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DescriptorError, DomainError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SzpiroError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
