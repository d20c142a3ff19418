"""Command-line front end: ``tptp-ntf <command> ...``.

Results go to standard output, diagnostics to standard error.  Exit codes:
0 success, 1 input error, 2 internal error, 3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .derivation import build_dag, verify_structure
from .embedding import embed, ledger, render
from .errors import TptpError
from .kripke import check_model, parse_interpretation, search_countermodel, write_interpretation
from .kripke.search import BUDGET_EXHAUSTED, DEFAULT_BUDGET, FOUND
from .logics import ModalAxiom, ModalFamily, NormalizedModalLogic, logic_of
from .syntax import census, check_types, load_problem, resolve_defaults

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_BUDGET = 3

# Used for problems without a logic statement: one world, nothing modal.
CLASSICAL = NormalizedModalLogic(ModalFamily.MODAL, "$constant", "$rigid", "$global",
                                 frozenset({ModalAxiom.K}))


class _Io:
    def __init__(self, out: TextIO, err: TextIO):
        self.out = out
        self.err = err

    def say(self, *lines: str) -> None:
        for line in lines:
            print(line, file=self.out)

    def warn(self, *lines: str) -> None:
        for line in lines:
            print(line, file=self.err)


def _szs(io: _Io, status: str, file: str) -> None:
    io.say(f"% SZS status {status} for {file}")


def _load(args, path: str, relaxed: bool = False):
    return load_problem(path, args.include_dir, relaxed=relaxed)


def _typed(args, io: _Io, path: str):
    p = _load(args, path)
    io.warn(*p.warnings)
    tp = resolve_defaults(p)
    return tp, check_types(tp)


def cmd_parse(args, io: _Io) -> int:
    tp, issues = _typed(args, io, args.file)
    io.warn(*(str(i) for i in issues))
    io.say(f"statements: {len(tp.problem.statements)}",
           f"type issues: {len(issues)}")
    return EXIT_INPUT if issues else EXIT_OK


def cmd_census(args, io: _Io) -> int:
    p = _load(args, args.file)
    io.warn(*p.warnings)
    io.say(*census(p).lines())
    return EXIT_OK


def cmd_check_spec(args, io: _Io) -> int:
    p = _load(args, args.file)
    logic = logic_of(p, required=True)
    io.say(*logic.describe())
    return EXIT_OK


def cmd_embed(args, io: _Io) -> int:
    tp, issues = _typed(args, io, args.file)
    if issues:
        io.warn(*(str(i) for i in issues))
        return EXIT_INPUT
    out = embed(tp, logic_of(tp.problem, required=True))
    text = render(out, with_ledger=args.ledger)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        io.say(text.rstrip("\n"))
    if args.ledger:
        io.warn(*ledger(out))
    return EXIT_OK


def cmd_check_model(args, io: _Io) -> int:
    try:
        tp, issues = _typed(args, io, args.problem)
        if issues:
            io.warn(*(str(i) for i in issues))
            _szs(io, "Unknown", args.problem)
            return EXIT_INPUT
        logic = logic_of(tp.problem) or CLASSICAL
        warnings: list[str] = []
        model = parse_interpretation(_load(args, args.model), tp, warnings)
        io.warn(*warnings)
        verdict = check_model(model, tp, logic)
    except TptpError:
        _szs(io, "Unknown", args.problem)
        raise
    io.say(*verdict.lines())
    _szs(io, verdict.szs, args.problem)
    return EXIT_OK


def cmd_find_countermodel(args, io: _Io) -> int:
    try:
        tp, issues = _typed(args, io, args.file)
        if issues:
            io.warn(*(str(i) for i in issues))
            _szs(io, "Unknown", args.file)
            return EXIT_INPUT
        logic = logic_of(tp.problem) or CLASSICAL
        result = search_countermodel(tp, logic, args.max_worlds, args.max_elems, args.budget)
    except TptpError:
        _szs(io, "Unknown", args.file)
        raise
    io.warn(f"candidates: {result.candidates}", f"evaluations: {result.evaluations}")
    if result.status == FOUND:
        text = write_interpretation(result.model, tp)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            io.say(text.rstrip("\n"))
        _szs(io, result.verdict.szs, args.file)
        return EXIT_OK
    if result.status == BUDGET_EXHAUSTED:
        _szs(io, "GaveUp", args.file)
        return EXIT_BUDGET
    _szs(io, "Unknown", args.file)
    return EXIT_OK


def cmd_verify_derivation(args, io: _Io) -> int:
    d = build_dag(_load(args, args.file, relaxed=True), allow_elided=args.allow_elided)
    io.warn(*d.warnings)
    problem = _load(args, args.problem, relaxed=True) if args.problem else None
    report = verify_structure(d, problem)
    io.say(*report.lines())
    return EXIT_OK if report.passed else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tptp-ntf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--include-dir", action="append", default=[], metavar="DIR",
                        help="extra directory for include directives (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and type-check a problem")
    p.add_argument("file")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("census", parents=[common], help="syntax statistics")
    p.add_argument("file")
    p.set_defaults(run=cmd_census)

    p = sub.add_parser("check-spec", parents=[common], help="validate the logic specification")
    p.add_argument("file")
    p.set_defaults(run=cmd_check_spec)

    p = sub.add_parser("embed", parents=[common], help="write the classical embedding")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.add_argument("--ledger", action="store_true", help="annotate statements with their provenance")
    p.set_defaults(run=cmd_embed)

    p = sub.add_parser("check-model", parents=[common], help="verify a model against a problem")
    p.add_argument("--model", required=True)
    p.add_argument("--problem", required=True)
    p.set_defaults(run=cmd_check_model)

    p = sub.add_parser("find-countermodel", parents=[common], help="bounded countermodel search")
    p.add_argument("file")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--max-elems", type=int, default=3)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help=f"work-unit limit (default: {DEFAULT_BUDGET})")
    p.add_argument("-o", "--output", help="model file (default: standard output)")
    p.set_defaults(run=cmd_find_countermodel)

    p = sub.add_parser("verify-derivation", parents=[common], help="structural derivation checks")
    p.add_argument("file")
    p.add_argument("--problem")
    p.add_argument("--allow-elided", action="store_true",
                   help="treat parents missing from an excerpt as placeholders")
    p.set_defaults(run=cmd_verify_derivation)
    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    io = _Io(out or sys.stdout, err or sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # usage errors are input errors; --help and --version exit 0
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT
    try:
        return args.run(args, io)
    except (TptpError, OSError) as e:
        io.warn(f"error: {e}")
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001
        io.warn(f"internal error: {type(e).__name__}: {e}")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
