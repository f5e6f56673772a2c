"""Syntax-level invariants: erasure, levels, alpha equivalence, renaming."""

import pytest

from moebius.syntax import (
    alpha_eq,
    App,
    Arrow,
    BoolT,
    BoxE,
    BoxT,
    Context,
    CTerm,
    CType,
    erase,
    free_names,
    fresh_name,
    HatVar,
    IntLit,
    IntT,
    Lam,
    level_of,
    PrimOp,
    rename,
    rename_context,
    RenameTerm,
    RenameType,
    TermDecl,
    TVar,
    TypeConstraint,
    TypeDecl,
    Var,
    EMPTY,
)


def td(name, level, ty=IntT(), local=EMPTY):
    return TermDecl(name, local, level, ty)


def tyd(name, level, local=EMPTY):
    return TypeDecl(name, local, level)


class TestLevels:
    def test_empty_context_is_level_zero(self):
        assert level_of(EMPTY) == 0

    def test_level_is_one_above_max(self):
        assert level_of(Context((td("x", 0),))) == 1
        assert level_of(Context((td("u", 2), td("x", 0)))) == 3

    def test_erased_context_level(self):
        assert level_of((HatVar("u", 2), HatVar("x", 0))) == 3
        assert level_of(()) == 0


class TestErase:
    def test_erase_keeps_names_levels_sorts(self):
        ctx = Context((tyd("a", 1), td("x", 0)))
        assert erase(ctx) == (HatVar("a", 1, True), HatVar("x", 0, False))

    def test_erase_rejects_solved_declarations(self):
        ctx = Context((TypeConstraint("a", EMPTY, 1, (), IntT()),))
        with pytest.raises(ValueError):
            erase(ctx)

    def test_erase_rejects_contradiction(self):
        with pytest.raises(ValueError):
            erase(Context((), True))


class TestContextConstruction:
    def test_rejects_ascending_levels(self):
        with pytest.raises(ValueError):
            Context((td("x", 0), td("u", 2)))

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            Context((td("x", 1), td("x", 0)))

    def test_equal_levels_allowed(self):
        ctx = Context((td("x", 1), td("y", 1)))
        assert len(ctx) == 2

    def test_rejects_local_above_entry_level(self):
        local = Context((td("y", 2),))
        with pytest.raises(ValueError):
            Context((td("x", 1, local=local),))


class TestAlphaEq:
    def test_lambda_binder_names_do_not_matter(self):
        a = Lam("x", IntT(), Var("x"))
        b = Lam("y", IntT(), Var("y"))
        assert alpha_eq(a, b)

    def test_annotations_are_metadata(self):
        a = Lam("x", IntT(), Var("x"))
        b = Lam("x", BoolT(), Var("x"))
        assert alpha_eq(a, b)

    def test_distinct_binders_do_not_collapse(self):
        a = Lam("x", None, Lam("y", None, Var("x")))
        b = Lam("x", None, Lam("y", None, Var("y")))
        assert not alpha_eq(a, b)

    def test_free_variables_must_match_exactly(self):
        assert alpha_eq(Var("z"), Var("z"))
        assert not alpha_eq(Var("z"), Var("w"))

    def test_box_binders(self):
        a = BoxE((HatVar("x", 0),), 1, PrimOp("+", Var("x"), IntLit(2)))
        b = BoxE((HatVar("y", 0),), 1, PrimOp("+", Var("y"), IntLit(2)))
        assert alpha_eq(a, b)
        c = BoxE((HatVar("y", 1),), 2, PrimOp("+", Var("y"), IntLit(2)))
        assert not alpha_eq(a, c)

    def test_box_local_metadata_ignored(self):
        a = BoxE((HatVar("x", 0),), 1, Var("x"), local=Context((td("x", 0),)))
        b = BoxE((HatVar("x", 0),), 1, Var("x"), local=None)
        assert alpha_eq(a, b)

    def test_closures_compare_pointwise(self):
        a = TVar("a", (RenameTerm("x", 0),))
        b = TVar("a", (RenameTerm("x", 0),))
        c = TVar("a", (RenameTerm("y", 0),))
        assert alpha_eq(a, b)
        assert not alpha_eq(a, c)

    def test_contextual_entries_bind_their_hat(self):
        a = TVar("a", (CTerm((HatVar("x", 0),), 1, Var("x")),))
        b = TVar("a", (CTerm((HatVar("z", 0),), 1, Var("z")),))
        assert alpha_eq(a, b)

    def test_types_and_terms_never_equal(self):
        assert not alpha_eq(IntT(), IntLit(0))

    def test_contexts_compare_up_to_alpha(self):
        c1 = Context((tyd("a", 1), td("x", 0, TVar("a"))))
        c2 = Context((tyd("b", 1), td("y", 0, TVar("b"))))
        assert alpha_eq(c1, c2)
        c3 = Context((tyd("b", 1), td("y", 0, IntT())))
        assert not alpha_eq(c1, c3)


class TestRename:
    def test_renames_free_occurrences(self):
        assert rename(Var("y"), {"y": "z"}) == Var("z")

    def test_binders_shadow(self):
        t = Lam("y", None, Var("y"))
        assert rename(t, {"y": "z"}) == t

    def test_hat_binders_shadow(self):
        t = BoxE((HatVar("y", 0),), 1, Var("y"))
        assert rename(t, {"y": "z"}) == t

    def test_rename_context_renames_own_declarations(self):
        ctx = Context((tyd("a", 1), td("x", 0, TVar("a"))))
        out = rename_context(ctx, {"a": "b"})
        assert out.entries[0].name == "b"
        assert out.entries[1].type == TVar("b")


class TestFreeNames:
    def test_lambda(self):
        t = Lam("x", None, App(Var("x"), Var("y")))
        assert free_names(t) == {"y"}

    def test_closure_hats_bind(self):
        t = Var("u", (CTerm((HatVar("x", 0),), 1, App(Var("x"), Var("w"))),))
        assert free_names(t) == {"u", "w"}

    def test_box_type_locals_bind_in_body(self):
        t = BoxT(Context((td("x", 0),)), 1, TVar("a", (RenameTerm("x", 0),)))
        assert free_names(t) == {"a"}


class TestFreshName:
    def test_no_clash_returns_base(self):
        assert fresh_name("x", {"y"}) == "x"

    def test_counts_up(self):
        assert fresh_name("x", {"x"}) == "x1"
        assert fresh_name("x", {"x", "x1"}) == "x2"

    def test_strips_digit_suffix(self):
        assert fresh_name("x2", {"x2"}) == "x1"
