"""Substitution engine.

The closure examples were hand-derived from the clause definitions
before the implementation existed and are frozen here; the level-guard
tests pin down which binders a substitution crosses.
"""

import pytest

from moebius.contexts import id_subst
from moebius.substitution import (
    append_subst,
    apply_context,
    apply_subst,
    apply_term,
    apply_type,
    chop_lower_subst,
    insert_subst,
    lookup_subst,
    single_subst_term,
    single_subst_type,
)
from moebius.syntax import (
    alpha_eq,
    Arrow,
    BoxE,
    BoxT,
    Context,
    CTerm,
    CType,
    EMPTY,
    erase,
    HatVar,
    IntLit,
    IntT,
    Lam,
    LetBox,
    PrimOp,
    RenameTerm,
    RenameType,
    TermDecl,
    TLam,
    TVar,
    TypeDecl,
    Var,
)


def td(name, level, ty=IntT(), local=EMPTY):
    return TermDecl(name, local, level, ty)


X0 = HatVar("x", 0)
U1 = HatVar("u", 1)
A1T = HatVar("a", 1, True)


class TestPlumbing:
    def test_lookup_is_positional_from_the_right(self):
        sigma = (CTerm((), 1, IntLit(1)), RenameTerm("z", 0))
        dom = (HatVar("a", 1), HatVar("b", 0))
        assert lookup_subst(sigma, dom, "b") == RenameTerm("z", 0)
        assert lookup_subst(sigma, dom, "a") == CTerm((), 1, IntLit(1))
        assert lookup_subst(sigma, dom, "c") is None

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            lookup_subst((RenameTerm("x", 0),), (), "x")

    def test_chop_keeps_high_pairs(self):
        sigma = (CTerm((), 2, IntLit(1)), RenameTerm("z", 0))
        dom = (HatVar("a", 2), HatVar("b", 0))
        s, d = chop_lower_subst(sigma, dom, 1)
        assert s == (CTerm((), 2, IntLit(1)),)
        assert d == (HatVar("a", 2),)

    def test_insert_equal_level_goes_right(self):
        sigma, dom = insert_subst(
            (RenameTerm("a", 1),), (HatVar("a", 1),), RenameTerm("b", 1), HatVar("b", 1)
        )
        assert dom == (HatVar("a", 1), HatVar("b", 1))
        sigma, dom = insert_subst(
            sigma, dom, RenameTerm("c", 2), HatVar("c", 2)
        )
        assert dom == (HatVar("c", 2), HatVar("a", 1), HatVar("b", 1))

    def test_append_requires_sorted_domain(self):
        with pytest.raises(ValueError):
            append_subst(
                (RenameTerm("a", 0),), (HatVar("a", 0),),
                (RenameTerm("b", 1),), (HatVar("b", 1),),
            )


class TestApplyType:
    def test_identity_on_closed_base(self):
        assert apply_type((), (), IntT()) == IntT()

    def test_variable_lookup_solves(self):
        sigma = (CType((), 0, IntT()),)
        dom = (HatVar("a", 0, True),)
        assert apply_type(sigma, dom, TVar("a")) == IntT()

    def test_variable_rename(self):
        sigma = (RenameType("b", 0),)
        dom = (HatVar("a", 0, True),)
        assert apply_type(sigma, dom, TVar("a")) == TVar("b")

    def test_untouched_variable_composes_closure(self):
        # c[a] under [int/a]: c stays, its closure is composed
        sigma = (CType((), 0, IntT()),)
        dom = (HatVar("a", 0, True),)
        t = TVar("c", (CType((), 0, TVar("a")),))
        out = apply_type(sigma, dom, t)
        assert out == TVar("c", (CType((), 0, IntT()),))

    def test_solution_applied_under_its_own_closure(self):
        # a's solution mentions its local x; the occurrence closure maps x
        sigma = (CType((X0,), 1, BoxT(Context((td("x", 0),)), 1, IntT())),)
        # solution here ignores x; exercise the two-step application
        dom = (A1T,)
        t = TVar("a", (RenameTerm("y", 0),))
        out = apply_type(sigma, dom, t)
        assert alpha_eq(out, BoxT(Context((td("x", 0),)), 1, IntT()))

    def test_box_below_domain_is_untouched(self):
        sigma = (CType((), 0, IntT()),)
        dom = (HatVar("a", 0, True),)
        t = BoxT(EMPTY, 2, TVar("b"))
        assert apply_type(sigma, dom, t) is t

    def test_box_at_level_drops_lower_entries(self):
        # a level-0 variable cannot occur inside level-1 code
        sigma = (CType((), 0, IntT()),)
        dom = (HatVar("a", 0, True),)
        t = BoxT(EMPTY, 1, TVar("a"))
        out = apply_type(sigma, dom, t)
        assert out == t  # chopped to nothing, body unchanged

    def test_box_reached_by_high_entry(self):
        sigma = (CType((), 1, IntT()),)
        dom = (HatVar("a", 1, True),)
        t = BoxT(EMPTY, 1, TVar("a"))
        assert apply_type(sigma, dom, t) == BoxT(EMPTY, 1, IntT())

    def test_box_local_types_are_substituted(self):
        sigma = (CType((), 1, IntT()),)
        dom = (HatVar("a", 1, True),)
        t = BoxT(Context((td("x", 0, TVar("a")),)), 1, TVar("a"))
        out = apply_type(sigma, dom, t)
        assert out == BoxT(Context((td("x", 0, IntT()),)), 1, IntT())

    def test_forall_binder_freshened_on_clash(self):
        # [b/a] under a binder named b must not capture
        sigma = (RenameType("b", 0),)
        dom = (HatVar("a", 0, True),)
        t = Forall_b = _forall("b", 0, Arrow(TVar("a"), TVar("b")))
        out = apply_type(sigma, dom, t)
        assert isinstance(out.body, Arrow)
        assert out.body.dom == TVar("b")  # the renamed free one
        assert out.body.cod == TVar(out.name)
        assert out.name != "b"


def _forall(name, level, body):
    from moebius.syntax import Forall

    return Forall(name, EMPTY, level, body)


class TestApplyTerm:
    def test_lambda_extension(self):
        sigma = (CTerm((), 0, IntLit(5)),)
        dom = (X0,)
        t = Lam("y", IntT(), PrimOp("+", Var("x"), Var("y")))
        out = apply_term(sigma, dom, t)
        assert alpha_eq(out, Lam("y", IntT(), PrimOp("+", IntLit(5), Var("y"))))

    def test_shadowing_binder_freshened(self):
        sigma = (CTerm((), 0, IntLit(5)),)
        dom = (X0,)
        t = Lam("x", IntT(), Var("x"))
        out = apply_term(sigma, dom, t)
        assert alpha_eq(out, Lam("x", IntT(), Var("x")))

    def test_capture_avoided(self):
        sigma = (CTerm((), 0, Var("y")),)
        dom = (X0,)
        t = Lam("y", IntT(), Var("x"))
        out = apply_term(sigma, dom, t)
        assert out.name != "y"
        assert out.body == Var("y")  # the substituted-in free y

    def test_level1_entry_crosses_level1_box(self):
        # [(x. x+2)/u^1] box(y. u[(. y)]) = box(y. y+2)
        sigma = (CTerm((X0,), 1, PrimOp("+", Var("x"), IntLit(2))),)
        dom = (U1,)
        target = BoxE(
            (HatVar("y", 0),),
            1,
            Var("u", (CTerm((), 0, Var("y")),)),
        )
        out = apply_term(sigma, dom, target)
        expected = BoxE((HatVar("y", 0),), 1, PrimOp("+", Var("y"), IntLit(2)))
        assert alpha_eq(out, expected)

    def test_level0_entry_stops_at_level1_box(self):
        sigma = (CTerm((), 0, IntLit(5)),)
        dom = (X0,)
        target = BoxE((), 1, Var("x"))
        assert apply_term(sigma, dom, target) == target

    def test_letbox_binder_extension(self):
        # substituting under let box at a lower level
        sigma = (CTerm((), 0, IntLit(7)),)
        dom = (X0,)
        target = LetBox(
            (), 1, "u", BoxE((), 1, IntLit(1)), PrimOp("+", Var("x"), Var("u"))
        )
        out = apply_term(sigma, dom, target)
        assert out.body == PrimOp("+", IntLit(7), Var("u"))

    def test_rename_closure_example(self):
        # u[(. y)] with u mapped to a rename keeps the closure
        sigma = (RenameTerm("v", 1),)
        dom = (U1,)
        t = Var("u", (CTerm((), 0, IntLit(3)),))
        assert apply_term(sigma, dom, t) == Var("v", (CTerm((), 0, IntLit(3)),))


class TestApplySubst:
    def test_renames_resolve_through(self):
        sigma = (CTerm((), 0, IntLit(9)),)
        dom = (X0,)
        rho = (RenameTerm("x", 0),)
        assert apply_subst(sigma, dom, rho) == (CTerm((), 0, IntLit(9)),)

    def test_unrelated_renames_pass(self):
        sigma = (CTerm((), 0, IntLit(9)),)
        dom = (X0,)
        rho = (RenameTerm("z", 0),)
        assert apply_subst(sigma, dom, rho) == rho

    def test_high_level_entry_untouched(self):
        sigma = (CTerm((), 0, IntLit(9)),)
        dom = (X0,)
        rho = (CTerm((), 2, Var("x")),)
        # level(dom) = 1 <= 2: code at level 2 cannot mention x@0
        assert apply_subst(sigma, dom, rho) == rho

    def test_low_level_entry_substituted(self):
        sigma = (CTerm((), 1, IntLit(9)),)
        dom = (U1,)
        rho = (CTerm((), 1, Var("u")),)
        assert apply_subst(sigma, dom, rho) == (CTerm((), 1, IntLit(9)),)

    def test_identity_composition_is_identity(self):
        dom = (HatVar("a", 1, True), X0)
        sigma = id_subst(dom)
        rho = (CType((), 1, TVar("a")), RenameTerm("x", 0))
        assert apply_subst(sigma, dom, rho) == rho


class TestApplyContext:
    def test_types_in_entries_substituted(self):
        sigma = (CType((), 1, IntT()),)
        dom = (A1T,)
        phi = Context((td("x", 0, TVar("a")),))
        out = apply_context(sigma, dom, phi)
        assert out == Context((td("x", 0, IntT()),))

    def test_prefix_identity_keeps_earlier_names(self):
        # y's type mentions the earlier local x: the prefix rename keeps it
        sigma = (CType((), 1, IntT()),)
        dom = (A1T,)
        inner = Context((td("x", 0, TVar("a")),))
        phi = Context(
            (
                TypeDecl("b", EMPTY, 0),
                td("y", 0, TVar("b")),
            )
        )
        out = apply_context(sigma, dom, phi)
        assert out.entries[1].type == TVar("b")

    def test_contradiction_preserved(self):
        out = apply_context((), (), Context((), True))
        assert out.contradiction


class TestSingleSubst:
    def test_type_beta_identity(self):
        # [(x. a[x]) / a] keeps a type mentioning a[...] intact
        local = Context((td("x", 0),))
        hat = erase(local)
        s = BoxT(local, 1, TVar("a", (RenameTerm("x", 0),)))
        out = single_subst_type(hat, 1, TVar("a", id_subst(hat)), "a", s)
        assert alpha_eq(out, s)

    def test_term_beta(self):
        out = single_subst_term((), 0, IntLit(3), "x", PrimOp("+", Var("x"), IntLit(1)))
        assert out == PrimOp("+", IntLit(3), IntLit(1))

    def test_letbox_contraction_shape(self):
        # [(x. x+2)/u] u[(. 3)] = 3+2
        out = single_subst_term(
            (X0,), 1, PrimOp("+", Var("x"), IntLit(2)), "u",
            Var("u", (CTerm((), 0, IntLit(3)),)),
        )
        assert out == PrimOp("+", IntLit(3), IntLit(2))

    def test_type_arg_level_guard(self):
        # a@1 solved by int crosses a level-1 box but not a level-3 one
        t1 = BoxT(EMPTY, 1, TVar("a"))
        t2 = BoxT(EMPTY, 2, TVar("b"))
        t3 = BoxT(EMPTY, 3, TVar("b"))
        assert single_subst_type((), 1, IntT(), "a", t1) == BoxT(EMPTY, 1, IntT())
        assert single_subst_type((), 1, IntT(), "a", t2) == t2
        assert single_subst_type((), 1, IntT(), "a", t3) is t3
