"""Command line front end.

Four subcommands: `check` type-checks every definition and the entry
expression of a program; `run` additionally evaluates the entry and prints
the resulting value; `dump-ast` prints the elaborated core tree in a stable
line-oriented form for golden tests; `meta` samples one of the registered
randomized laws.

Exit codes: 0 success, 1 type error (or a failed law), 2 parse error,
3 runtime error (stuck, match failure, out of fuel).
"""

from __future__ import annotations

import argparse
import sys

from .elaborate import Program, check_program, elaborate_program, link
from .machine import EvalError, MatchFailure, OutOfFuel, Stuck, evaluate
from .parser import ParseError, parse_program
from .pretty import pretty_term, pretty_type, to_sexp
from .typecheck import TypeCheckError


def _load(path: str) -> Program:
    try:
        with open(path, encoding="utf-8") as fh:
            src = fh.read()
    except OSError as exc:
        raise ParseError(str(exc), 0, 0)
    return elaborate_program(parse_program(src))


def _cmd_check(args) -> int:
    prog = _load(args.file)
    for name, ty in check_program(prog):
        print(f"{name} : {pretty_type(ty, annotate=False)}")
    return 0


def _cmd_run(args) -> int:
    prog = _load(args.file)
    check_program(prog)
    if prog.entry is None:
        print("run: program has no entry expression", file=sys.stderr)
        return 1

    on_step = None
    if args.trace:

        def on_step(e):
            print(pretty_term(e, annotate=False), file=sys.stderr)

    value = evaluate(link(prog), fuel=args.fuel, on_step=on_step)
    print(pretty_term(value, annotate=False))
    return 0


def _cmd_dump_ast(args) -> int:
    prog = _load(args.file)
    print(to_sexp(prog))
    return 0


def _cmd_meta(args) -> int:
    from .meta import check_lemma, lemma_names

    if args.lemma not in lemma_names():
        choices = ", ".join(lemma_names())
        print(f"meta: unknown lemma {args.lemma!r}; one of: {choices}", file=sys.stderr)
        return 2
    report = check_lemma(args.lemma, samples=args.samples, seed=args.seed)
    print(report.summary())
    if report.counterexample is not None:
        print(report.counterexample)
        return 1
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="moebius",
        description="Check and run multi-level staged programs (.mbs files).",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check a program")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("run", help="type-check and evaluate a program's entry")
    p.add_argument("file")
    p.add_argument("--fuel", type=int, default=None, help="step budget (default: MOEBIUS_FUEL or 1000000)")
    p.add_argument("--trace", action="store_true", help="print each step to stderr")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("dump-ast", help="print the elaborated core tree")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_dump_ast)

    p = sub.add_parser("meta", help="sample a randomized law")
    p.add_argument("--lemma", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_meta)

    return ap


def app(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (TypeCheckError, ValueError) as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return 1
    except OutOfFuel as exc:
        print(f"runtime error: out of fuel ({exc})", file=sys.stderr)
        return 3
    except MatchFailure as exc:
        print(f"runtime error: no branch matches ({exc})", file=sys.stderr)
        return 3
    except (Stuck, EvalError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(app())
