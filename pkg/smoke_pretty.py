import sys

sys.path.insert(0, "src")

from smoke_corpus import PROGRAMS
from moebius.contexts import insert
from moebius.syntax import EMPTY, TermDecl, alpha_eq
from moebius.elaborate import _Elab, elaborate_program, link
from moebius.machine import evaluate
from moebius.parser import parse_program, parse_term
from moebius.pretty import pretty_term
from moebius.typecheck import type_of

failures = 0
for name, src in PROGRAMS.items():
    try:
        prog = elaborate_program(parse_program(src))
        gamma = EMPTY
        env = {}
        for d in prog.defs:
            txt = pretty_term(d.term, env)
            back, _ = _Elab().synth(gamma, parse_term(txt))
            if not alpha_eq(back, d.term):
                raise AssertionError(f"def {d.name} full-mode roundtrip:\n  {txt}")
            gamma = insert(gamma, TermDecl(d.name, EMPTY, 0, d.sig))
            env[d.name] = EMPTY
        ety = type_of(gamma, prog.entry)
        v = evaluate(link(prog), fuel=2_000_000)
        # full mode, standalone synth
        txt = pretty_term(v)
        back, _ = _Elab().synth(EMPTY, parse_term(txt))
        if not alpha_eq(back, v):
            raise AssertionError(f"value full-mode roundtrip:\n  {txt}")
        # display mode, checked against the entry's type
        txt2 = pretty_term(v, annotate=False)
        back2 = _Elab().check(EMPTY, parse_term(txt2), ety)
        if not alpha_eq(back2, v):
            raise AssertionError(f"value display-mode roundtrip:\n  {txt2}")
        print(f"{name}: OK   {txt2}")
    except Exception as exc:
        failures += 1
        print(f"{name}: FAIL  {type(exc).__name__}: {exc}")

sys.exit(1 if failures else 0)
