"""Small-step evaluation: reductions, branch matching, fuel."""

import pytest

import moebius.machine as machine
from astlib import (
    CHURCH,
    CHURCH_HAT,
    CHURCH_LOCAL,
    INT_LOCAL,
    SPLICE_RESULT,
    church,
    int_box,
    pred_fn,
    splice_sum,
)
from moebius.contexts import id_subst
from moebius.machine import (
    MatchFailure,
    OutOfFuel,
    Stuck,
    evaluate,
    is_value,
    match_branch,
    select_branch,
    step,
)
from moebius.syntax import (
    alpha_eq,
    App,
    Arrow,
    BoolLit,
    BoxE,
    BoxT,
    Branch,
    Case,
    Cons,
    Context,
    CType,
    EMPTY,
    Fix,
    hat_of,
    HatVar,
    Hd,
    If,
    IntLit,
    IntT,
    IsNil,
    Lam,
    LetBox,
    Nil,
    PrimOp,
    RenameTerm,
    TApp,
    TermDecl,
    Tl,
    TLam,
    TVar,
    TypeDecl,
    Var,
)


class TestBasicSteps:
    def test_beta(self):
        e = App(Lam("x", IntT(), PrimOp("+", Var("x"), IntLit(1))), IntLit(2))
        assert evaluate(e) == IntLit(3)

    def test_call_by_value_order(self):
        # the argument reduces before the call
        e = App(Lam("x", IntT(), IntLit(9)), PrimOp("+", IntLit(1), IntLit(1)))
        e1 = step(e)
        assert e1 == App(Lam("x", IntT(), IntLit(9)), IntLit(2))

    def test_type_beta(self):
        poly = TLam(
            "a", 1, Lam("c", BoxT(EMPTY, 1, TVar("a")), Var("c")), local=EMPTY
        )
        e = TApp(poly, (), 1, IntT())
        got = evaluate(e)
        assert alpha_eq(got, Lam("c", BoxT(EMPTY, 1, IntT()), Var("c")))

    def test_let_box_splices(self):
        got = evaluate(splice_sum())
        assert alpha_eq(got, SPLICE_RESULT)

    def test_fix_unfolds(self):
        # triangular numbers by structural recursion on an int
        body = Lam(
            "n",
            IntT(),
            If(
                PrimOp("<=", Var("n"), IntLit(0)),
                IntLit(0),
                PrimOp(
                    "+",
                    Var("n"),
                    App(Var("go"), PrimOp("-", Var("n"), IntLit(1))),
                ),
            ),
        )
        tri = Fix("go", Arrow(IntT(), IntT()), body)
        assert evaluate(App(tri, IntLit(4))) == IntLit(10)

    def test_if_and_comparison(self):
        e = If(PrimOp("=", IntLit(2), IntLit(2)), IntLit(1), IntLit(0))
        assert evaluate(e) == IntLit(1)

    def test_lists(self):
        xs = Cons(IntLit(1), Cons(IntLit(2), Nil(IntT())))
        assert evaluate(Hd(xs)) == IntLit(1)
        assert evaluate(Hd(Tl(xs))) == IntLit(2)
        assert evaluate(IsNil(Tl(Tl(xs)))) == BoolLit(True)
        assert evaluate(IsNil(xs)) == BoolLit(False)

    def test_head_of_nil_is_stuck(self):
        with pytest.raises(Stuck):
            evaluate(Hd(Nil(IntT())))

    def test_free_variable_is_stuck(self):
        with pytest.raises(Stuck):
            step(Var("ghost"))


class TestBoxes:
    def test_boxes_are_inert(self):
        # a redex under a box does not fire
        frozen = int_box(App(Lam("w", IntT(), Var("w")), Var("y")))
        assert is_value(frozen)
        assert evaluate(frozen) == frozen

    def test_let_box_renames_through_its_own_binder(self):
        # the bound code names its variable z, the let box calls it w
        zloc = Context((TermDecl("z", EMPTY, 0, IntT()),))
        wloc = Context((TermDecl("w", EMPTY, 0, IntT()),))
        what = (HatVar("w", 0),)
        t1 = BoxE(hat_of(zloc), 1, PrimOp("*", Var("z"), IntLit(3)), local=zloc)
        e = LetBox(
            what,
            1,
            "U",
            t1,
            BoxE(
                what,
                1,
                PrimOp("+", Var("U", (RenameTerm("w", 0),)), IntLit(1)),
                local=wloc,
            ),
        )
        want = BoxE(
            what,
            1,
            PrimOp("+", PrimOp("*", Var("w"), IntLit(3)), IntLit(1)),
            local=wloc,
        )
        assert alpha_eq(evaluate(e), want)


class TestCase:
    def test_pred_of_three(self):
        e = App(pred_fn(), church(3))
        assert alpha_eq(evaluate(e), church(2))

    def test_pred_of_zero(self):
        e = App(pred_fn(), church(0))
        assert alpha_eq(evaluate(e), church(0))

    def test_first_matching_branch_wins(self):
        idc = ()
        pv1 = Context(
            (
                TermDecl("X", EMPTY, 1, IntT()),
                TermDecl("Y", EMPTY, 1, IntT()),
            )
        )
        br1 = Branch(
            pv1,
            (),
            PrimOp("+", Var("X", idc), Var("Y", idc)),
            EMPTY,
            1,
            IntT(),
            BoxE((), 1, Var("X", idc), local=EMPTY),
        )
        pv2 = Context((TermDecl("Z", EMPTY, 1, IntT()),))
        br2 = Branch(
            pv2,
            (),
            Var("Z", idc),
            EMPTY,
            1,
            IntT(),
            BoxE((), 1, IntLit(99), local=EMPTY),
        )
        scrut = BoxE((), 1, PrimOp("+", IntLit(1), IntLit(2)), local=EMPTY)
        e = Case(scrut, BoxT(EMPTY, 1, IntT()), (br1, br2))
        got = evaluate(e)
        assert alpha_eq(got, BoxE((), 1, IntLit(1), local=EMPTY))

    def test_match_failure(self):
        pv = Context(
            (
                TermDecl("X", EMPTY, 1, IntT()),
                TermDecl("Y", EMPTY, 1, IntT()),
            )
        )
        br = Branch(
            pv,
            (),
            PrimOp("+", Var("X", ()), Var("Y", ())),
            EMPTY,
            1,
            IntT(),
            BoxE((), 1, Var("X", ()), local=EMPTY),
        )
        e = Case(BoxE((), 1, IntLit(7), local=EMPTY), BoxT(EMPTY, 1, IntT()), (br,))
        with pytest.raises(MatchFailure):
            evaluate(e)

    def test_annotation_solves_type_patvar(self):
        # matching [x:int |-1 int] against the template [x:'A |-1 'A]
        pv = Context((TypeDecl("A", EMPTY, 1),))
        xint = Context((TermDecl("x", EMPTY, 0, IntT()),))
        xa = Context((TermDecl("x", EMPTY, 0, TVar("A", ())),))
        br = Branch(
            pv,
            hat_of(xa),
            Var("x", id_subst(hat_of(xa))),
            xa,
            1,
            TVar("A", ()),
            BoxE((), 1, IntLit(0), local=EMPTY),
        )
        scrut = BoxE(
            hat_of(xint), 1, Var("x", id_subst(hat_of(xint))), local=xint
        )
        sigma = match_branch(scrut, BoxT(xint, 1, IntT()), br)
        assert sigma is not None
        assert sigma == (CType((), 1, IntT()),)

    def test_select_branch_returns_first(self):
        e = App(pred_fn(), church(1))
        got = evaluate(e)
        assert alpha_eq(got, church(0))


class TestFuel:
    def diverging(self):
        return Fix("f", IntT(), Var("f"))

    def test_out_of_fuel(self):
        with pytest.raises(OutOfFuel):
            evaluate(self.diverging(), fuel=100)

    def test_fuel_from_environment(self, monkeypatch):
        monkeypatch.setenv("MOEBIUS_FUEL", "25")
        with pytest.raises(OutOfFuel):
            evaluate(self.diverging())
        assert evaluate(PrimOp("+", IntLit(1), IntLit(1))) == IntLit(2)

    def test_explicit_fuel_overrides_environment(self, monkeypatch):
        monkeypatch.setenv("MOEBIUS_FUEL", "1")
        e = PrimOp("+", PrimOp("+", IntLit(1), IntLit(1)), IntLit(1))
        assert evaluate(e, fuel=10) == IntLit(3)

    def test_step_counter_callback(self):
        seen = []
        evaluate(
            PrimOp("+", PrimOp("+", IntLit(1), IntLit(1)), IntLit(1)),
            on_step=seen.append,
        )
        assert seen == [PrimOp("+", IntLit(2), IntLit(1)), IntLit(3)]


class TestDebugValidation:
    def test_pred_validates(self, monkeypatch):
        monkeypatch.setattr(machine, "debug_validate", True)
        got = evaluate(App(pred_fn(), church(3)))
        assert alpha_eq(got, church(2))

    def test_splice_validates(self, monkeypatch):
        monkeypatch.setattr(machine, "debug_validate", True)
        assert alpha_eq(evaluate(splice_sum()), SPLICE_RESULT)
