"""Shallow pattern typing, closure patterns, and pattern reflection."""

import pytest

from astlib import CHURCH_HAT, CHURCH_LOCAL, INT_HAT, INT_LOCAL
from moebius.contexts import id_subst
from moebius.patterns import (
    pat_kind_check,
    pat_subst_check,
    pat_type_check,
    pattern_reflect,
)
from moebius.syntax import (
    alpha_eq,
    App,
    Arrow,
    BoxE,
    BoxT,
    Cons,
    Context,
    CTerm,
    CType,
    EMPTY,
    hat_of,
    IntLit,
    IntT,
    Lam,
    LetBox,
    ListT,
    Nil,
    PrimOp,
    RenameTerm,
    TermDecl,
    TVar,
    TypeDecl,
    Var,
)
from moebius.typecheck import TypeCheckError, type_eq, type_of

CHURCH_ID = id_subst(CHURCH_HAT)
X_DECL = TermDecl("X", CHURCH_LOCAL, 1, TVar("a"))
PV_X = Context((X_DECL,))


def err_kind(fn, *args):
    with pytest.raises(TypeCheckError) as exc:
        fn(*args)
    return exc.value.kind


class TestTermPatterns:
    def test_bound_variable(self):
        # the zero-numeral pattern: plain bound x
        pat_type_check(EMPTY, CHURCH_LOCAL, 1, Var("x"), TVar("a"))

    def test_successor_pattern(self):
        # f X with X a level-1 pattern variable over the numeral context
        pat = App(Var("f"), Var("X", CHURCH_ID))
        pat_type_check(PV_X, CHURCH_LOCAL, 1, pat, TVar("a"))

    def test_patvar_level_mismatch(self):
        pv = Context((TermDecl("X", CHURCH_LOCAL, 2, TVar("a")),))
        pat = Var("X", CHURCH_ID)
        assert err_kind(pat_type_check, pv, CHURCH_LOCAL, 1, pat, TVar("a")) == (
            "levelViolation"
        )

    def test_patvar_wrong_local(self):
        pv = Context((TermDecl("X", INT_LOCAL, 1, IntT()),))
        pat = Var("X", CHURCH_ID)
        assert err_kind(pat_type_check, pv, CHURCH_LOCAL, 1, pat, TVar("a")) == (
            "typeMismatch"
        )

    def test_patvar_non_identity_closure(self):
        # renaming x to itself twice is not the identity closure
        bad = (CHURCH_ID[0], CHURCH_ID[1], CHURCH_ID[1])
        assert err_kind(
            pat_type_check, PV_X, CHURCH_LOCAL, 1, Var("X", bad), TVar("a")
        ) == "typeMismatch"

    def test_linearity(self):
        pv = Context((TermDecl("X", INT_LOCAL, 1, IntT()),))
        idc = id_subst(INT_HAT)
        pat = PrimOp("+", Var("X", idc), Var("X", idc))
        assert err_kind(pat_type_check, pv, INT_LOCAL, 1, pat, IntT()) == (
            "typeMismatch"
        )

    def test_separation_condition(self):
        # every pattern variable must live at the case level or above
        pv = Context((TermDecl("X", EMPTY, 0, IntT()),))
        assert err_kind(
            pat_type_check, pv, INT_LOCAL, 1, Var("X", ()), IntT()
        ) == "levelViolation"

    def test_literal_and_arith(self):
        pat_type_check(EMPTY, INT_LOCAL, 1, PrimOp("+", Var("y"), IntLit(1)), IntT())

    def test_nested_box_raises_level(self):
        # under a level-2 box the pattern variable must sit at level 2
        pv = Context((TermDecl("X", EMPTY, 2, IntT()),))
        pat = BoxE((), 2, Var("X", ()), local=EMPTY)
        pat_type_check(pv, INT_LOCAL, 1, pat, BoxT(EMPTY, 2, IntT()))
        low = Context((TermDecl("X", EMPTY, 1, IntT()),))
        assert err_kind(
            pat_type_check, low, INT_LOCAL, 1, pat, BoxT(EMPTY, 2, IntT())
        ) == "levelViolation"

    def test_let_box_pattern(self):
        # let box(z. U) = x in U with (z := 0) binds U inside the pattern
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        bound = Context((TermDecl("x", EMPTY, 0, BoxT(zloc, 1, IntT())),))
        pat = LetBox(
            hat_of(zloc),
            1,
            "U",
            Var("x"),
            Var("U", (CTerm((), 0, IntLit(0)),)),
        )
        pat_type_check(EMPTY, bound, 1, pat, IntT())

    def test_lambda_pattern_checks_against_arrow(self):
        pat = Lam("w", None, Var("w"))
        pat_type_check(EMPTY, EMPTY, 1, pat, Arrow(IntT(), IntT()))
        assert err_kind(pat_type_check, EMPTY, EMPTY, 1, pat, IntT()) == (
            "typeMismatch"
        )

    def test_list_patterns(self):
        pv = Context(
            (
                TermDecl("H", EMPTY, 1, IntT()),
                TermDecl("T", EMPTY, 1, ListT(IntT())),
            )
        )
        pat = Cons(Var("H", ()), Var("T", ()))
        pat_type_check(pv, EMPTY, 1, pat, ListT(IntT()))
        pat_type_check(EMPTY, EMPTY, 1, Nil(None), ListT(IntT()))


class TestTypePatterns:
    def test_type_patvar(self):
        pv = Context((TypeDecl("A", EMPTY, 1),))
        pat_kind_check(pv, EMPTY, 1, TVar("A", ()))

    def test_type_patvar_linearity(self):
        pv = Context((TypeDecl("A", EMPTY, 1),))
        pat = Arrow(TVar("A", ()), TVar("A", ()))
        assert err_kind(pat_kind_check, pv, EMPTY, 1, pat) == "typeMismatch"

    def test_bound_type_variable(self):
        pat_kind_check(EMPTY, CHURCH_LOCAL, 1, Arrow(TVar("a"), TVar("a")))

    def test_term_patvar_in_type_position(self):
        pv = Context((TermDecl("X", EMPTY, 1, IntT()),))
        assert err_kind(pat_kind_check, pv, EMPTY, 1, TVar("X", ())) == (
            "kindMismatch"
        )

    def test_box_type_pattern_raises_level(self):
        pv = Context((TypeDecl("A", EMPTY, 2),))
        pat = BoxT(EMPTY, 2, TVar("A", ()))
        pat_kind_check(pv, CHURCH_LOCAL, 1, pat)


class TestClosurePatterns:
    def test_rename_entry(self):
        # a closure may rename the domain's z to the bound variable y
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        bound = Context((TermDecl("y", EMPTY, 0, IntT()),))
        pat_subst_check(EMPTY, bound, 1, (RenameTerm("y", 0),), zloc)

    def test_rename_target_type_mismatch(self):
        zloc = Context((TermDecl("z", EMPTY, 0, ListT(IntT())),))
        bound = Context((TermDecl("y", EMPTY, 0, IntT()),))
        assert err_kind(
            pat_subst_check, EMPTY, bound, 1, (RenameTerm("y", 0),), zloc
        ) == "typeMismatch"

    def test_nested_pattern_entry(self):
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        pv = Context((TermDecl("X", EMPTY, 1, IntT()),))
        pat_subst_check(pv, EMPTY, 1, (CTerm((), 0, Var("X", ())),), zloc)

    def test_arity(self):
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        assert err_kind(pat_subst_check, EMPTY, EMPTY, 1, (), zloc) == (
            "arityMismatch"
        )

    def test_dependency_on_substituted_entry_rejected(self):
        # 'c is filled by a genuine pattern entry, so z : 'c cannot follow
        dom = Context(
            (
                TypeDecl("c", EMPTY, 1),
                TermDecl("z", EMPTY, 0, TVar("c")),
            )
        )
        sigma = (CType((), 1, IntT()), CTerm((), 0, IntLit(0)))
        assert err_kind(pat_subst_check, EMPTY, EMPTY, 1, sigma, dom) == (
            "typeMismatch"
        )


class TestPatternReflection:
    def reflect_type(self, pv, bound, level, pat):
        return type_of(pv, pattern_reflect(bound, level, pat))

    def test_bound_variable_reflects(self):
        t = self.reflect_type(EMPTY, CHURCH_LOCAL, 1, Var("x"))
        assert alpha_eq(t, BoxT(CHURCH_LOCAL, 1, TVar("a")))

    def test_successor_reflects(self):
        pat = App(Var("f"), Var("X", CHURCH_ID))
        t = self.reflect_type(PV_X, CHURCH_LOCAL, 1, pat)
        assert type_eq(PV_X, t, BoxT(CHURCH_LOCAL, 1, TVar("a")))

    def test_reflection_agrees_with_pattern_typing(self):
        cases = [
            (EMPTY, CHURCH_LOCAL, 1, Var("x"), TVar("a")),
            (PV_X, CHURCH_LOCAL, 1, App(Var("f"), Var("X", CHURCH_ID)), TVar("a")),
            (EMPTY, INT_LOCAL, 1, PrimOp("+", Var("y"), IntLit(1)), IntT()),
        ]
        for pv, bound, k, pat, want in cases:
            pat_type_check(pv, bound, k, pat, want)
            got = self.reflect_type(pv, bound, k, pat)
            assert type_eq(pv, got, BoxT(bound, k, want))

    def test_rejects_ground_level(self):
        with pytest.raises(ValueError):
            pattern_reflect(EMPTY, 0, IntLit(1))
