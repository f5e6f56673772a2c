"""Shared hand-built syntax trees for the test suite."""

from moebius.contexts import id_subst
from moebius.syntax import (
    App,
    Arrow,
    BoxE,
    BoxT,
    Branch,
    Case,
    Context,
    CTerm,
    EMPTY,
    Forall,
    hat_of,
    IntLit,
    IntT,
    Lam,
    LetBox,
    PrimOp,
    TermDecl,
    TLam,
    TVar,
    TypeDecl,
    Var,
)

# locals of level-1 code over one int variable
INT_LOCAL = Context((TermDecl("y", EMPTY, 0, IntT()),))
INT_HAT = hat_of(INT_LOCAL)
INT_CODE = BoxT(INT_LOCAL, 1, IntT())


def int_box(body):
    return BoxE(INT_HAT, 1, body, local=INT_LOCAL)


# church numerals as level-1 code: ['a:*, x:'a, f:'a->'a |-^1 'a]
CHURCH_LOCAL = Context(
    (
        TypeDecl("a", EMPTY, 0),
        TermDecl("x", EMPTY, 0, TVar("a")),
        TermDecl("f", EMPTY, 0, Arrow(TVar("a"), TVar("a"))),
    )
)
CHURCH_HAT = hat_of(CHURCH_LOCAL)
CHURCH = BoxT(CHURCH_LOCAL, 1, TVar("a"))


def church(n: int) -> BoxE:
    body = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return BoxE(CHURCH_HAT, 1, body, local=CHURCH_LOCAL)


def pred_fn() -> Lam:
    """case c of | box('a,x,f. x) -> c | (X). box('a,x,f. f X) -> box(X)."""
    idc = id_subst(CHURCH_HAT)
    br_zero = Branch(
        EMPTY, CHURCH_HAT, Var("x"), CHURCH_LOCAL, 1, TVar("a"), Var("c")
    )
    pv = Context((TermDecl("X", CHURCH_LOCAL, 1, TVar("a")),))
    br_succ = Branch(
        pv,
        CHURCH_HAT,
        App(Var("f"), Var("X", idc)),
        CHURCH_LOCAL,
        1,
        TVar("a"),
        BoxE(CHURCH_HAT, 1, Var("X", idc), local=CHURCH_LOCAL),
    )
    return Lam("c", CHURCH, Case(Var("c"), CHURCH, (br_zero, br_succ)))


def splice_sum() -> LetBox:
    """let box(y. U) = box(y. 3*y) in let box(y. V) = box(y. 2*y+2)
    in box(y. U + V)."""
    idc = id_subst(INT_HAT)
    t1 = int_box(PrimOp("*", IntLit(3), Var("y")))
    t2 = int_box(PrimOp("+", PrimOp("*", IntLit(2), Var("y")), IntLit(2)))
    body = BoxE(INT_HAT, 1, PrimOp("+", Var("U", idc), Var("V", idc)), local=INT_LOCAL)
    return LetBox(INT_HAT, 1, "U", t1, LetBox(INT_HAT, 1, "V", t2, body))


SPLICE_RESULT = int_box(
    PrimOp(
        "+",
        PrimOp("*", IntLit(3), Var("y")),
        PrimOp("+", PrimOp("*", IntLit(2), Var("y")), IntLit(2)),
    )
)
