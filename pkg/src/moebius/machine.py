"""Small-step call-by-value evaluation.

Redexes fire left to right; boxed code is inert (nothing reduces under
a box).  Case analysis on a boxed value tries its branches in order:
first the branch's annotation is unified against the scrutinee's
contextual type with the pattern variables as the only flexible ones,
then the pattern skeleton is matched structurally against the code,
and the two solution sources are assembled into one substitution over
the pattern-variable context.  Any gap (contradiction, structural
mismatch, an undetermined pattern variable) makes the branch a
non-match.

With `debug_validate` on, every case step re-checks the three facts it
relies on: the assembled substitution types against the pattern
variables, it maps the branch's annotation onto the scrutinee's type,
and it maps the reflected pattern onto the scrutinee itself.

`evaluate` runs to a value under a fuel bound (the MOEBIUS_FUEL
environment variable, or the `fuel` argument, caps the step count).
"""

from __future__ import annotations

import os

from .contexts import id_subst, lookup_decl
from .substitution import (
    apply_term,
    apply_type,
    single_subst_term,
    single_subst_type,
)
from .syntax import (
    alpha_eq,
    App,
    Arrow,
    BoolLit,
    BoolT,
    BoxE,
    BoxT,
    Case,
    Cons,
    Context,
    CTerm,
    CType,
    Fix,
    Forall,
    free_names,
    hat_of,
    HatVar,
    Hd,
    If,
    IntLit,
    IntT,
    IsNil,
    Lam,
    LetBox,
    ListT,
    Nil,
    PrimOp,
    rename,
    RenameTerm,
    RenameType,
    TApp,
    Term,
    TermDecl,
    TLam,
    Tl,
    TVar,
    TypeConstraint,
    Var,
)

DEFAULT_FUEL = 1_000_000

# re-validate the premises of every case step (slow; used by tests)
debug_validate = False


class EvalError(Exception):
    pass


class Stuck(EvalError):
    pass


class MatchFailure(EvalError):
    pass


class OutOfFuel(EvalError):
    pass


class ValidationError(EvalError):
    pass


def is_value(e: Term) -> bool:
    match e:
        case Lam() | TLam() | BoxE() | IntLit() | BoolLit() | Nil():
            return True
        case Cons(head=h, tail=t):
            return is_value(h) and is_value(t)
        case _:
            return False


def step(e: Term) -> Term:
    """One reduction step; raises Stuck when no rule applies."""
    match e:
        case App(fn=f, arg=a):
            if not is_value(f):
                return App(step(f), a)
            if not is_value(a):
                return App(f, step(a))
            match f:
                case Lam(name=x, body=b):
                    return single_subst_term((), 0, a, x, b)
            raise Stuck(f"cannot apply {type(f).__name__}")
        case TApp(fn=f, ctx_hat=hat, level=n, arg=ty):
            if not is_value(f):
                return TApp(step(f), hat, n, ty)
            match f:
                case TLam(name=a, body=b):
                    return single_subst_type(hat, n, ty, a, b)
            raise Stuck(f"cannot type-apply {type(f).__name__}")
        case LetBox(ctx_hat=hat, level=n, name=u, bound=e1, body=e2):
            if not is_value(e1):
                return LetBox(hat, n, u, step(e1), e2)
            match e1:
                case BoxE(ctx_hat=bhat, level=k, body=code):
                    return single_subst_term(bhat, k, code, u, e2)
            raise Stuck(f"let box on {type(e1).__name__}")
        case Case(scrut=s, annot=annot, branches=brs):
            if not is_value(s):
                return Case(step(s), annot, brs)
            if not isinstance(s, BoxE):
                raise Stuck(f"case on {type(s).__name__}")
            br, sigma = select_branch(s, annot, brs)
            if debug_validate:
                _validate_case_step(s, annot, br, sigma)
            return apply_term(sigma, hat_of(br.pat_vars), br.body)
        case If(cond=c, then=t, els=f):
            if not is_value(c):
                return If(step(c), t, f)
            match c:
                case BoolLit(value=True):
                    return t
                case BoolLit(value=False):
                    return f
            raise Stuck(f"if on {type(c).__name__}")
        case PrimOp(op=o, lhs=a, rhs=b):
            if not is_value(a):
                return PrimOp(o, step(a), b)
            if not is_value(b):
                return PrimOp(o, a, step(b))
            match a, b:
                case IntLit(value=x), IntLit(value=y):
                    match o:
                        case "+":
                            return IntLit(x + y)
                        case "-":
                            return IntLit(x - y)
                        case "*":
                            return IntLit(x * y)
                        case "=":
                            return BoolLit(x == y)
                        case "<=":
                            return BoolLit(x <= y)
            raise Stuck(f"arithmetic on non-numbers")
        case Cons(head=h, tail=t):
            if not is_value(h):
                return Cons(step(h), t)
            return Cons(h, step(t))
        case Hd(arg=a):
            if not is_value(a):
                return Hd(step(a))
            match a:
                case Cons(head=h):
                    return h
                case Nil():
                    raise Stuck("head of an empty list")
            raise Stuck(f"head of {type(a).__name__}")
        case Tl(arg=a):
            if not is_value(a):
                return Tl(step(a))
            match a:
                case Cons(tail=t):
                    return t
                case Nil():
                    raise Stuck("tail of an empty list")
            raise Stuck(f"tail of {type(a).__name__}")
        case IsNil(arg=a):
            if not is_value(a):
                return IsNil(step(a))
            match a:
                case Nil():
                    return BoolLit(True)
                case Cons():
                    return BoolLit(False)
            raise Stuck(f"isnil of {type(a).__name__}")
        case Fix(name=f, body=b):
            return single_subst_term((), 0, e, f, b)
        case Var(name=x):
            raise Stuck(f"free variable {x!r}")
        case _:
            raise Stuck(f"no rule for {type(e).__name__}")


def evaluate(e: Term, fuel: int | None = None, on_step=None) -> Term:
    if fuel is None:
        fuel = int(os.environ.get("MOEBIUS_FUEL", DEFAULT_FUEL))
    for _ in range(fuel):
        if is_value(e):
            return e
        e = step(e)
        if on_step is not None:
            on_step(e)
    if is_value(e):
        return e
    raise OutOfFuel(f"no value after {fuel} steps")


# ---------------------------------------------------------------------------
# branch selection


def select_branch(scrut: BoxE, annot: BoxT, branches):
    for br in branches:
        sigma = match_branch(scrut, annot, br)
        if sigma is not None:
            return br, sigma
    raise MatchFailure("no branch matches the scrutinee")


def match_branch(scrut: BoxE, annot: BoxT, br):
    """The substitution for the branch's pattern variables, or None."""
    from .unification import refines, unify_contextual_type

    pv = br.pat_vars
    g = unify_contextual_type(
        pv,
        (annot.local, annot.level, annot.body),
        (br.annot_ctx, br.annot_level, br.annot_type),
    )
    if g.contradiction:
        return None
    assert refines(g, pv), "annotation matching must only solve pattern variables"

    bindings: dict = {}
    pairs = [
        (d.name, s.name, d.level, not isinstance(d, TermDecl))
        for d, s in zip(br.annot_ctx.entries, scrut.local.entries)
    ]
    if not _match_term(pv, br.pattern, scrut.body, pairs, bindings):
        return None

    solved = {d.name: d for d in g.entries if isinstance(d, TypeConstraint)}
    sigma = []
    for d in pv.entries:
        ent = bindings.get(d.name)
        if ent is None and d.name in solved:
            c = solved[d.name]
            sol = _resolve(g, c.solution)
            if free_names(sol) & (pv.names() - {v.name for v in c.solution_hat}):
                return None
            ent = CType(c.solution_hat, c.level, sol)
        if ent is None:
            return None
        sigma.append(ent)
    return tuple(sigma)


def _resolve(g: Context, t):
    """Chase recorded solutions inside a type (used at match time)."""
    match t:
        case TVar(name=a, subst=s):
            d = lookup_decl(g, a)
            if isinstance(d, TypeConstraint):
                return _resolve(g, apply_type(s, d.solution_hat, d.solution))
            return TVar(a, tuple(_resolve_ent(g, x) for x in s))
        case Arrow(dom=a, cod=b):
            return Arrow(_resolve(g, a), _resolve(g, b))
        case ListT(elem=x):
            return ListT(_resolve(g, x))
        case BoxT(local=loc, level=n, body=b):
            return BoxT(loc, n, _resolve(g, b))
        case Forall(name=a, local=loc, level=n, body=b):
            return Forall(a, loc, n, _resolve(g, b))
        case _:
            return t


def _resolve_ent(g: Context, ent):
    match ent:
        case CType(ctx_hat=h, level=k, type=ty):
            return CType(h, k, _resolve(g, ty))
        case _:
            return ent


def _cur_hat(pairs, local: Context):
    """The binder for a pattern variable's solution: the local context's
    shape carrying the scrutinee-side names currently in scope."""
    assert len(pairs) == len(local.entries)
    return tuple(
        HatVar(s, lvl, ist) for (_, s, lvl, ist) in pairs
    )


def _match_term(pv: Context, pat, sub, pairs, bindings) -> bool:
    pat_to_scrut = {p: s for p, s, _, _ in pairs}
    match pat, sub:
        case Var(name=x, subst=ps), _ if lookup_decl(pv, x) is not None:
            d = lookup_decl(pv, x)
            hat = _cur_hat(pairs, d.local)
            return _bind(bindings, x, CTerm(hat, d.level, sub))
        case Var(name=x, subst=ps), Var(name=y, subst=ss):
            if pat_to_scrut.get(x) != y or len(ps) != len(ss):
                return False
            for pe, se in zip(ps, ss):
                if not _match_closure_entry(pv, pe, se, pairs, bindings):
                    return False
            return True
        case App(fn=f1, arg=a1), App(fn=f2, arg=a2):
            return _match_term(pv, f1, f2, pairs, bindings) and _match_term(
                pv, a1, a2, pairs, bindings
            )
        case Lam(name=x1, body=b1), Lam(name=x2, body=b2):
            return _match_term(
                pv, b1, b2, pairs + [(x1, x2, 0, False)], bindings
            )
        case Fix(name=f1, body=b1), Fix(name=f2, body=b2):
            return _match_term(
                pv, b1, b2, pairs + [(f1, f2, 0, False)], bindings
            )
        case TLam(name=a1, level=k1, body=b1), TLam(name=a2, level=k2, body=b2):
            if k1 != k2:
                return False
            return _match_term(
                pv, b1, b2, pairs + [(a1, a2, k1, True)], bindings
            )
        case TApp(fn=f1, ctx_hat=h1, level=k1, arg=t1), TApp(
            fn=f2, ctx_hat=h2, level=k2, arg=t2
        ):
            if k1 != k2 or len(h1) != len(h2):
                return False
            if not _match_term(pv, f1, f2, pairs, bindings):
                return False
            inner = [p for p in pairs if p[2] >= k1] + [
                (v1.name, v2.name, v1.level, v1.is_type)
                for v1, v2 in zip(h1, h2)
            ]
            return _match_type(pv, t1, t2, inner, bindings)
        case BoxE(ctx_hat=h1, level=k1, body=b1), BoxE(
            ctx_hat=h2, level=k2, body=b2
        ):
            if k1 != k2 or len(h1) != len(h2):
                return False
            if any(v1.level != v2.level or v1.is_type != v2.is_type
                   for v1, v2 in zip(h1, h2)):
                return False
            inner = [p for p in pairs if p[2] >= k1] + [
                (v1.name, v2.name, v1.level, v1.is_type)
                for v1, v2 in zip(h1, h2)
            ]
            return _match_term(pv, b1, b2, inner, bindings)
        case LetBox(ctx_hat=h1, level=k1, name=u1, bound=e1, body=b1), LetBox(
            ctx_hat=h2, level=k2, name=u2, bound=e2, body=b2
        ):
            if k1 != k2 or len(h1) != len(h2):
                return False
            if not _match_term(pv, e1, e2, pairs, bindings):
                return False
            return _match_term(
                pv, b1, b2, pairs + [(u1, u2, k1, False)], bindings
            )
        case IntLit(value=v1), IntLit(value=v2):
            return v1 == v2
        case BoolLit(value=v1), BoolLit(value=v2):
            return v1 == v2
        case PrimOp(op=o1, lhs=a1, rhs=b1), PrimOp(op=o2, lhs=a2, rhs=b2):
            if o1 != o2:
                return False
            return _match_term(pv, a1, a2, pairs, bindings) and _match_term(
                pv, b1, b2, pairs, bindings
            )
        case If(cond=c1, then=t1, els=f1), If(cond=c2, then=t2, els=f2):
            return (
                _match_term(pv, c1, c2, pairs, bindings)
                and _match_term(pv, t1, t2, pairs, bindings)
                and _match_term(pv, f1, f2, pairs, bindings)
            )
        case Nil(), Nil():
            return True
        case Cons(head=h1, tail=t1), Cons(head=h2, tail=t2):
            return _match_term(pv, h1, h2, pairs, bindings) and _match_term(
                pv, t1, t2, pairs, bindings
            )
        case Hd(arg=a1), Hd(arg=a2):
            return _match_term(pv, a1, a2, pairs, bindings)
        case Tl(arg=a1), Tl(arg=a2):
            return _match_term(pv, a1, a2, pairs, bindings)
        case IsNil(arg=a1), IsNil(arg=a2):
            return _match_term(pv, a1, a2, pairs, bindings)
        case _:
            return False


def _match_type(pv: Context, pat, sub, pairs, bindings) -> bool:
    pat_to_scrut = {p: s for p, s, _, _ in pairs}
    match pat, sub:
        case TVar(name=a, subst=ps), _ if lookup_decl(pv, a) is not None:
            d = lookup_decl(pv, a)
            hat = _cur_hat(pairs, d.local)
            return _bind(bindings, a, CType(hat, d.level, sub))
        case TVar(name=a, subst=ps), TVar(name=b, subst=ss):
            if pat_to_scrut.get(a) != b or len(ps) != len(ss):
                return False
            for pe, se in zip(ps, ss):
                if not _match_closure_entry(pv, pe, se, pairs, bindings):
                    return False
            return True
        case Arrow(dom=a1, cod=b1), Arrow(dom=a2, cod=b2):
            return _match_type(pv, a1, a2, pairs, bindings) and _match_type(
                pv, b1, b2, pairs, bindings
            )
        case ListT(elem=e1), ListT(elem=e2):
            return _match_type(pv, e1, e2, pairs, bindings)
        case IntT(), IntT():
            return True
        case BoolT(), BoolT():
            return True
        case BoxT(local=l1, level=k1, body=b1), BoxT(local=l2, level=k2, body=b2):
            inner = _match_locals(pv, l1, l2, k1, k2, pairs, bindings)
            if inner is None:
                return False
            return _match_type(pv, b1, b2, inner, bindings)
        case Forall(name=a1, local=l1, level=k1, body=b1), Forall(
            name=a2, local=l2, level=k2, body=b2
        ):
            if k1 != k2 or not alpha_eq(l1, l2):
                return False
            return _match_type(
                pv, b1, b2, pairs + [(a1, a2, k1, True)], bindings
            )
        case _:
            return False


def _match_locals(pv, l1: Context, l2: Context, k1, k2, pairs, bindings):
    if k1 != k2 or len(l1) != len(l2):
        return None
    inner = [p for p in pairs if p[2] >= k1]
    for d1, d2 in zip(l1.entries, l2.entries):
        if d1.level != d2.level or type(d1) is not type(d2):
            return None
        if isinstance(d1, TermDecl):
            if not _match_type(pv, d1.type, d2.type, inner, bindings):
                return None
        inner.append((d1.name, d2.name, d1.level, not isinstance(d1, TermDecl)))
    return inner


def _match_closure_entry(pv, pe, se, pairs, bindings) -> bool:
    pat_to_scrut = {p: s for p, s, _, _ in pairs}
    match pe, se:
        case RenameTerm(name=x, level=k1), RenameTerm(name=y, level=k2):
            return k1 == k2 and pat_to_scrut.get(x) == y
        case RenameType(name=a, level=k1), RenameType(name=b, level=k2):
            return k1 == k2 and pat_to_scrut.get(a) == b
        case CTerm(ctx_hat=h1, level=k1, term=b1), CTerm(
            ctx_hat=h2, level=k2, term=b2
        ):
            if k1 != k2 or len(h1) != len(h2):
                return False
            inner = [p for p in pairs if p[2] >= k1] + [
                (v1.name, v2.name, v1.level, v1.is_type)
                for v1, v2 in zip(h1, h2)
            ]
            return _match_term(pv, b1, b2, inner, bindings)
        case CType(ctx_hat=h1, level=k1, type=t1), CType(
            ctx_hat=h2, level=k2, type=t2
        ):
            if k1 != k2 or len(h1) != len(h2):
                return False
            inner = [p for p in pairs if p[2] >= k1] + [
                (v1.name, v2.name, v1.level, v1.is_type)
                for v1, v2 in zip(h1, h2)
            ]
            return _match_type(pv, t1, t2, inner, bindings)
        case _:
            return False


def _bind(bindings: dict, name: str, ent) -> bool:
    old = bindings.get(name)
    if old is None:
        bindings[name] = ent
        return True
    return _entry_alpha(old, ent)


def _entry_alpha(e1, e2) -> bool:
    match e1, e2:
        case CTerm(ctx_hat=h1, level=k1, term=b1), CTerm(
            ctx_hat=h2, level=k2, term=b2
        ):
            pass
        case CType(ctx_hat=h1, level=k1, type=b1), CType(
            ctx_hat=h2, level=k2, type=b2
        ):
            pass
        case _:
            return False
    if k1 != k2 or len(h1) != len(h2):
        return False
    m = {v2.name: v1.name for v1, v2 in zip(h1, h2) if v1.name != v2.name}
    return alpha_eq(b1, rename(b2, m))


# ---------------------------------------------------------------------------
# debug validation of case steps


def _validate_case_step(scrut: BoxE, annot: BoxT, br, sigma) -> None:
    from .syntax import EMPTY
    from .typecheck import TypeCheckError, subst_check

    try:
        subst_check(EMPTY, sigma, br.pat_vars)
    except TypeCheckError as exc:
        raise ValidationError(
            f"case step: solution fails to type against the pattern "
            f"variables: {exc}"
        )
    pv_hat = hat_of(br.pat_vars)
    got_ty = apply_type(
        sigma, pv_hat, BoxT(br.annot_ctx, br.annot_level, br.annot_type)
    )
    if not alpha_eq(got_ty, annot):
        raise ValidationError(
            "case step: instantiated branch annotation differs from the "
            "scrutinee's type"
        )
    reflected = BoxE(
        hat_of(br.annot_ctx), br.annot_level, br.pattern, local=br.annot_ctx
    )
    got = apply_term(sigma, pv_hat, reflected)
    if not alpha_eq(got, scrut):
        raise ValidationError(
            "case step: instantiated pattern differs from the scrutinee"
        )
