"""Unification over constraint contexts: solving, occurs, totality."""

from hypothesis import given, settings, strategies as st

from astlib import CHURCH_LOCAL, INT_LOCAL
from moebius.syntax import (
    Arrow,
    BoolT,
    BoxT,
    Context,
    CType,
    EMPTY,
    Forall,
    IntT,
    ListT,
    RenameType,
    TermDecl,
    TVar,
    TypeConstraint,
    TypeDecl,
)
from moebius.typecheck import type_eq
from moebius.unification import (
    occurs,
    refines,
    unify_context,
    unify_contextual_type,
    unify_subst,
    unify_type,
)

FLEX_A = Context((TypeDecl("a", EMPTY, 1),))


def solution_of(gamma, name):
    for d in gamma.entries:
        if d.name == name and isinstance(d, TypeConstraint):
            return d.solution
    return None


class TestSolving:
    def test_flexible_against_ground(self):
        g = unify_type(FLEX_A, EMPTY, TVar("a", ()), IntT())
        assert not g.contradiction
        assert solution_of(g, "a") == IntT()
        assert refines(g, FLEX_A)

    def test_ground_against_flexible(self):
        g = unify_type(FLEX_A, EMPTY, IntT(), TVar("a", ()))
        assert solution_of(g, "a") == IntT()

    def test_occurs_check(self):
        assert occurs(FLEX_A, "a", ListT(TVar("a", ())))
        g = unify_type(FLEX_A, EMPTY, TVar("a", ()), ListT(TVar("a", ())))
        assert g.contradiction

    def test_occurs_through_solutions(self):
        g = Context(
            (
                TypeDecl("a", EMPTY, 1),
                TypeConstraint("b", EMPTY, 1, (), TVar("a", ())),
            )
        )
        assert occurs(g, "a", TVar("b", ()))

    def test_later_variable_may_name_earlier(self):
        g = Context((TypeDecl("r", EMPTY, 1), TypeDecl("a", EMPTY, 1)))
        out = unify_type(g, EMPTY, TVar("a", ()), Arrow(TVar("r", ()), IntT()))
        assert solution_of(out, "a") == Arrow(TVar("r", ()), IntT())

    def test_solution_out_of_scope_contradicts(self):
        # a precedes r, so r is not in a's solution scope
        g = Context((TypeDecl("a", EMPTY, 1), TypeDecl("r", EMPTY, 1)))
        phi = Context((TypeDecl("r", EMPTY, 1),))
        out = unify_type(g, phi, TVar("a", ()), Arrow(TVar("r", ()), IntT()))
        assert out.contradiction

    def test_both_flexible_later_takes_earlier(self):
        g = Context((TypeDecl("a", EMPTY, 1), TypeDecl("b", EMPTY, 1)))
        out = unify_type(g, EMPTY, TVar("a", ()), TVar("b", ()))
        assert solution_of(out, "b") == TVar("a", ())
        assert solution_of(out, "a") is None

    def test_solved_variable_unfolds(self):
        g = Context((TypeConstraint("a", EMPTY, 1, (), IntT()),))
        out = unify_type(g, EMPTY, TVar("a", ()), IntT())
        assert out == g

    def test_rigid_mismatch(self):
        assert unify_type(EMPTY, EMPTY, IntT(), BoolT()).contradiction

    def test_same_rigid_pair_returns_input(self):
        phi = Context((TypeDecl("r", EMPTY, 1),))
        out = unify_type(EMPTY, phi, TVar("r", ()), TVar("r", ()))
        assert out == EMPTY


class TestStructural:
    def test_arrow_decomposes(self):
        g = Context((TypeDecl("a", EMPTY, 1), TypeDecl("b", EMPTY, 1)))
        out = unify_type(
            g, EMPTY, Arrow(TVar("a", ()), TVar("b", ())), Arrow(IntT(), BoolT())
        )
        assert solution_of(out, "a") == IntT()
        assert solution_of(out, "b") == BoolT()

    def test_box_level_mismatch(self):
        t1 = BoxT(EMPTY, 1, IntT())
        t2 = BoxT(EMPTY, 2, IntT())
        assert unify_type(EMPTY, EMPTY, t1, t2).contradiction

    def test_box_aligns_locals(self):
        g = Context((TypeDecl("a", EMPTY, 1),))
        lx = Context((TermDecl("x", EMPTY, 0, TVar("a", ())),))
        ly = Context((TermDecl("y", EMPTY, 0, IntT()),))
        out = unify_type(g, EMPTY, BoxT(lx, 1, TVar("a", ())), BoxT(ly, 1, IntT()))
        assert solution_of(out, "a") == IntT()

    def test_forall_alpha(self):
        t1 = Forall("c", EMPTY, 1, Arrow(TVar("c", ()), TVar("c", ())))
        t2 = Forall("d", EMPTY, 1, Arrow(TVar("d", ()), TVar("d", ())))
        out = unify_type(EMPTY, EMPTY, t1, t2)
        assert not out.contradiction

    def test_forall_solves_under_binder(self):
        g = Context((TypeDecl("a", EMPTY, 1),))
        t1 = Forall("c", EMPTY, 1, Arrow(TVar("c", ()), TVar("a", ())))
        t2 = Forall("d", EMPTY, 1, Arrow(TVar("d", ()), IntT()))
        out = unify_type(g, EMPTY, t1, t2)
        assert solution_of(out, "a") == IntT()

    def test_binder_cannot_leak_into_solution(self):
        g = Context((TypeDecl("a", EMPTY, 1),))
        t1 = Forall("c", EMPTY, 1, TVar("a", ()))
        t2 = Forall("d", EMPTY, 1, TVar("d", ()))
        out = unify_type(g, EMPTY, t1, t2)
        assert out.contradiction


class TestContextualTypes:
    def test_refining_branch_annotation(self):
        # scrutinee (x:'a |-^1 'a) against branch (x:int |-^1 int)
        g = Context((TypeDecl("a", EMPTY, 1),))
        ct1 = (Context((TermDecl("x", EMPTY, 0, TVar("a", ())),)), 1, TVar("a", ()))
        ct2 = (Context((TermDecl("x", EMPTY, 0, IntT()),)), 1, IntT())
        out = unify_contextual_type(g, ct1, ct2)
        assert solution_of(out, "a") == IntT()
        assert refines(out, g)

    def test_level_mismatch(self):
        ct1 = (EMPTY, 1, IntT())
        ct2 = (EMPTY, 2, IntT())
        assert unify_contextual_type(EMPTY, ct1, ct2).contradiction

    def test_identical_sides_are_identity(self):
        ct = (CHURCH_LOCAL, 1, TVar("a"))
        g = unify_contextual_type(EMPTY, ct, ct)
        assert g == EMPTY

    def test_context_length_mismatch(self):
        ct1 = (INT_LOCAL, 1, IntT())
        ct2 = (EMPTY, 1, IntT())
        assert unify_contextual_type(EMPTY, ct1, ct2).contradiction

    def test_constraint_entry_rejected(self):
        solved = Context((TypeConstraint("a", EMPTY, 1, (), IntT()),))
        g, _ = unify_context(EMPTY, EMPTY, solved, solved)
        assert g.contradiction


class TestClosureUnification:
    def test_rename_against_expansion(self):
        # (c := y) matches the eta-expanded payload (. 'y)
        phi = Context((TypeDecl("y", EMPTY, 1),))
        dom = Context((TypeDecl("c", EMPTY, 1),))
        s1 = (RenameType("y", 1),)
        s2 = (CType((), 1, TVar("y", ())),)
        out = unify_subst(EMPTY, phi, s1, s2, dom)
        assert not out.contradiction

    def test_payloads_unify(self):
        g = Context((TypeDecl("a", EMPTY, 1),))
        cloc = Context((TypeDecl("c", EMPTY, 1),))
        s1 = (CType((), 1, TVar("a", ())),)
        s2 = (CType((), 1, IntT()),)
        out = unify_subst(g, EMPTY, s1, s2, cloc)
        assert solution_of(out, "a") == IntT()

    def test_rename_mismatch(self):
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        phi = Context(
            (
                TermDecl("y1", EMPTY, 0, IntT()),
                TermDecl("y2", EMPTY, 0, IntT()),
            )
        )
        from moebius.syntax import RenameTerm

        out = unify_subst(
            EMPTY, phi, (RenameTerm("y1", 0),), (RenameTerm("y2", 0),), zloc
        )
        assert out.contradiction


class TestRefines:
    def test_solving_refines(self):
        g = Context((TypeDecl("a", EMPTY, 1), TypeDecl("b", EMPTY, 1)))
        out = unify_type(g, EMPTY, TVar("a", ()), IntT())
        assert refines(out, g)

    def test_reorder_does_not_refine(self):
        g1 = Context((TypeDecl("a", EMPTY, 1), TypeDecl("b", EMPTY, 1)))
        g2 = Context((TypeDecl("b", EMPTY, 1), TypeDecl("a", EMPTY, 1)))
        assert not refines(g2, g1)

    def test_contradiction_refines(self):
        assert refines(EMPTY.with_contradiction(), EMPTY)
        assert not refines(EMPTY, EMPTY.with_contradiction())


# a small pool of closed and one-variable types for totality checking
def _types(names):
    leaf = st.sampled_from(
        [IntT(), BoolT()] + [TVar(n, ()) for n in names]
    )
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: Arrow(*p)),
            inner.map(ListT),
            inner.map(lambda t: BoxT(EMPTY, 1, t)),
        ),
        max_leaves=6,
    )


class TestTotality:
    @settings(max_examples=120, deadline=None)
    @given(_types(["a", "b"]), _types(["a", "b"]))
    def test_always_returns_refinement(self, t, s):
        g = Context((TypeDecl("a", EMPTY, 1), TypeDecl("b", EMPTY, 1)))
        out = unify_type(g, EMPTY, t, s)
        assert refines(out, g)

    @settings(max_examples=120, deadline=None)
    @given(_types(["a"]), _types(["a"]))
    def test_success_means_equal_modulo(self, t, s):
        g = Context((TypeDecl("a", EMPTY, 1),))
        out = unify_type(g, EMPTY, t, s)
        if not out.contradiction:
            assert type_eq(out, t, s)
