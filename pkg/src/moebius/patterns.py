"""Pattern checking for case analysis on code.

A branch declares pattern variables (a level-sorted context) and a
binder context for the code's own local variables; the pattern itself
is a term skeleton whose leaves are either those bound variables or
pattern-variable occurrences carrying identity closures.

`pat_type_check` runs bidirectionally over the skeleton.  The judgment
threads the current code level: descending into a nested box, type
abstraction, type argument or let box raises it to the maximum of the
outer and inner levels.  A pattern-variable occurrence is well formed
when its declared local context is exactly the bound context in scope
(up to renaming) and its declared level is the current code level;
each pattern variable may occur at most once.

`pattern_reflect` rebuilds the pattern as an ordinary boxed term, so
an independent type check of the reflected term validates the pattern
rules.

Equality here is purely structural: patterns never consult constraint
solutions.
"""

from __future__ import annotations

from .contexts import append, chop_lower, id_subst, insert, lookup_decl
from .substitution import apply_type, single_subst_type
from .syntax import (
    alpha_eq,
    App,
    Arrow,
    BoolLit,
    BoolT,
    BoxE,
    BoxT,
    Cons,
    Context,
    CTerm,
    CType,
    EMPTY,
    Fix,
    Forall,
    hat_of,
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
    rename_context,
    RenameTerm,
    RenameType,
    TApp,
    Term,
    TermDecl,
    TLam,
    Tl,
    TVar,
    Type,
    TypeDecl,
    Var,
)
from .typecheck import (
    ARITY_MISMATCH,
    KIND_MISMATCH,
    LEVEL_VIOLATION,
    TYPE_MISMATCH,
    TypeCheckError,
    UNBOUND,
    _match_hat_names,
)


def _err(kind: str, msg: str):
    raise TypeCheckError(kind, msg)


def pat_type_check(
    pv: Context, bound: Context, level: int, pattern: Term, expected: Type
) -> None:
    """pv ; (bound)^level |- pattern : expected."""
    for d in pv.entries:
        if d.level < level:
            _err(
                LEVEL_VIOLATION,
                f"pattern variable {d.name!r} at level {d.level}, "
                f"scrutinee code at {level}",
            )
    _PatChecker(pv).check(bound, level, pattern, expected)


def pat_kind_check(pv: Context, bound: Context, level: int, pattern: Type) -> None:
    """pv ; (bound)^level |- pattern type."""
    _PatChecker(pv).kind(bound, level, pattern)


class _PatChecker:
    def __init__(self, pv: Context):
        self.pv = pv
        self.used: set = set()

    def _mark(self, name: str) -> None:
        if name in self.used:
            _err(
                TYPE_MISMATCH,
                f"pattern variable {name!r} occurs more than once",
            )
        self.used.add(name)

    def _patvar(self, name: str):
        d = lookup_decl(self.pv, name)
        return d

    # -- term patterns ----------------------------------------------------

    def synth(self, bound: Context, n: int, p: Term) -> Type:
        match p:
            case Var(name=x, subst=s):
                d = self._patvar(x)
                if d is not None:
                    if not isinstance(d, TermDecl):
                        _err(KIND_MISMATCH, f"'{x} is a type pattern variable")
                    self._mark(x)
                    if d.level != n:
                        _err(
                            LEVEL_VIOLATION,
                            f"pattern variable {x!r} at level {d.level}, "
                            f"used at {n}",
                        )
                    if not alpha_eq(d.local, bound):
                        _err(
                            TYPE_MISMATCH,
                            f"pattern variable {x!r} expects a different "
                            f"local context",
                        )
                    if s != id_subst(hat_of(bound)):
                        _err(
                            TYPE_MISMATCH,
                            f"pattern variable {x!r} must carry the "
                            f"identity closure",
                        )
                    m = dict(
                        zip(
                            (e.name for e in d.local.entries),
                            (e.name for e in bound.entries),
                        )
                    )
                    return rename(d.type, m)
                db = lookup_decl(bound, x)
                if db is None:
                    _err(UNBOUND, f"pattern variable {x!r} is not declared")
                if not isinstance(db, TermDecl):
                    _err(KIND_MISMATCH, f"'{x} is a type variable, not a term")
                pat_subst_check(self, bound, n, s, db.local)
                return apply_type(s, hat_of(db.local), db.type)
            case App(fn=f, arg=a):
                tf = self.synth(bound, n, f)
                match tf:
                    case Arrow(dom=s, cod=t):
                        self.check(bound, n, a, s)
                        return t
                    case _:
                        _err(TYPE_MISMATCH, f"pattern applies a non-function {tf}")
            case TApp(fn=f, ctx_hat=hat, level=k, arg=ty):
                tf = self.synth(bound, n, f)
                match tf:
                    case Forall(name=a, local=loc, level=k2, body=s):
                        if k != k2:
                            _err(
                                LEVEL_VIOLATION,
                                f"type argument at level {k}, abstraction at {k2}",
                            )
                        loc2 = _match_hat_names(hat, loc, type_vars_only=True)
                        inner = append(chop_lower(bound, k), loc2)
                        self.kind(inner, max(n, k), ty)
                        return single_subst_type(hat, k, ty, a, s)
                    case _:
                        _err(TYPE_MISMATCH, f"pattern type-applies {tf}")
            case LetBox(ctx_hat=hat, level=k, name=u, bound=e1, body=e2):
                t1 = self.synth(bound, n, e1)
                match t1:
                    case BoxT(local=loc, level=k2, body=s):
                        if k != k2:
                            _err(
                                LEVEL_VIOLATION,
                                f"let box binder at level {k}, code at {k2}",
                            )
                        loc2 = _match_hat_names(hat, loc)
                        s2 = rename(
                            s,
                            dict(
                                zip(
                                    (d.name for d in loc.entries),
                                    (d.name for d in loc2.entries),
                                )
                            ),
                        )
                        inner = insert(bound, TermDecl(u, loc2, k, s2))
                        return self.synth(inner, max(n, k), e2)
                    case _:
                        _err(TYPE_MISMATCH, f"let box pattern on {t1}")
            case BoxE(ctx_hat=hat, level=k, body=b, local=loc):
                if loc is None:
                    _err(
                        TYPE_MISMATCH,
                        "boxed pattern needs an expected type to determine "
                        "its local context",
                    )
                loc2 = _match_hat_names(hat, loc)
                inner = append(chop_lower(bound, k), loc2)
                t = self.synth(inner, max(n, k), b)
                return BoxT(loc2, k, t)
            case Lam(name=x, ty=ty, body=b):
                if ty is None:
                    _err(
                        TYPE_MISMATCH,
                        "unannotated lambda pattern needs an expected type",
                    )
                inner = insert(bound, TermDecl(x, EMPTY, 0, ty))
                return Arrow(ty, self.synth(inner, n, b))
            case Fix(name=f, ty=ty, body=b):
                if ty is None:
                    _err(TYPE_MISMATCH, "unannotated fix pattern")
                inner = insert(bound, TermDecl(f, EMPTY, 0, ty))
                self.check(inner, n, b, ty)
                return ty
            case IntLit():
                return IntT()
            case BoolLit():
                return BoolT()
            case PrimOp(op=o, lhs=a, rhs=b):
                self.check(bound, n, a, IntT())
                self.check(bound, n, b, IntT())
                return BoolT() if o in ("=", "<=") else IntT()
            case If(cond=c, then=t, els=f):
                self.check(bound, n, c, BoolT())
                tt = self.synth(bound, n, t)
                self.check(bound, n, f, tt)
                return tt
            case Nil(elem=t):
                if t is None:
                    _err(TYPE_MISMATCH, "bare nil pattern needs an expected type")
                return ListT(t)
            case Cons(head=h, tail=tl):
                th = self.synth(bound, n, h)
                self.check(bound, n, tl, ListT(th))
                return ListT(th)
            case Hd(arg=a):
                ta = self.synth(bound, n, a)
                match ta:
                    case ListT(elem=s):
                        return s
                _err(TYPE_MISMATCH, f"head of non-list pattern {ta}")
            case Tl(arg=a):
                ta = self.synth(bound, n, a)
                match ta:
                    case ListT():
                        return ta
                _err(TYPE_MISMATCH, f"tail of non-list pattern {ta}")
            case IsNil(arg=a):
                ta = self.synth(bound, n, a)
                match ta:
                    case ListT():
                        return BoolT()
                _err(TYPE_MISMATCH, f"isnil of non-list pattern {ta}")
            case _:
                _err(KIND_MISMATCH, f"unsupported pattern form {type(p).__name__}")

    def check(self, bound: Context, n: int, p: Term, want: Type) -> None:
        match p, want:
            case Lam(name=x, ty=ty, body=b), Arrow(dom=s, cod=t):
                if ty is not None and not alpha_eq(ty, s):
                    _err(
                        TYPE_MISMATCH,
                        f"lambda pattern annotated {ty}, expected domain {s}",
                    )
                inner = insert(bound, TermDecl(x, EMPTY, 0, s))
                self.check(inner, n, b, t)
            case Lam(), _:
                _err(TYPE_MISMATCH, f"lambda pattern against {want}")
            case TLam(name=a, level=k, body=b, local=loc), Forall(
                name=a2, local=loc2, level=k2, body=t
            ):
                if k != k2:
                    _err(
                        LEVEL_VIOLATION,
                        f"type abstraction pattern at level {k}, expected {k2}",
                    )
                if loc is not None and not alpha_eq(loc, loc2):
                    _err(
                        TYPE_MISMATCH,
                        "type abstraction pattern has a different kind context",
                    )
                inner = insert(bound, TypeDecl(a, loc2, k))
                self.check(inner, max(n, k), b, rename(t, {a2: a}))
            case TLam(), _:
                _err(TYPE_MISMATCH, f"type abstraction pattern against {want}")
            case BoxE(ctx_hat=hat, level=k, body=b, local=loc), BoxT(
                local=loc2, level=k2, body=t
            ):
                if k != k2:
                    _err(
                        LEVEL_VIOLATION,
                        f"boxed pattern at level {k}, expected {k2}",
                    )
                if loc is not None and not alpha_eq(loc, loc2):
                    _err(TYPE_MISMATCH, "boxed pattern has a different local context")
                loc3 = _match_hat_names(hat, loc2)
                m = dict(
                    zip(
                        (d.name for d in loc2.entries),
                        (d.name for d in loc3.entries),
                    )
                )
                inner = append(chop_lower(bound, k), loc3)
                self.check(inner, max(n, k), b, rename(t, m))
            case BoxE(), _:
                _err(TYPE_MISMATCH, f"boxed pattern against {want}")
            case Nil(elem=e), ListT(elem=s):
                if e is not None and not alpha_eq(e, s):
                    _err(TYPE_MISMATCH, f"nil pattern at {e}, expected {s}")
            case Nil(), _:
                _err(TYPE_MISMATCH, f"nil pattern against {want}")
            case Cons(head=h, tail=tl), ListT(elem=s):
                self.check(bound, n, h, s)
                self.check(bound, n, tl, want)
            case _:
                got = self.synth(bound, n, p)
                if not alpha_eq(got, want):
                    _err(
                        TYPE_MISMATCH,
                        f"pattern has type {got}, expected {want}",
                    )

    # -- type patterns -----------------------------------------------------

    def kind(self, bound: Context, n: int, p: Type) -> None:
        match p:
            case TVar(name=a, subst=s):
                d = self._patvar(a)
                if d is not None:
                    if isinstance(d, TermDecl):
                        _err(KIND_MISMATCH, f"{a!r} is a term pattern variable")
                    self._mark(a)
                    if d.level != n:
                        _err(
                            LEVEL_VIOLATION,
                            f"type pattern variable '{a} at level {d.level}, "
                            f"used at {n}",
                        )
                    if not alpha_eq(d.local, bound):
                        _err(
                            TYPE_MISMATCH,
                            f"type pattern variable '{a} expects a different "
                            f"local context",
                        )
                    if s != id_subst(hat_of(bound)):
                        _err(
                            TYPE_MISMATCH,
                            f"type pattern variable '{a} must carry the "
                            f"identity closure",
                        )
                    return
                db = lookup_decl(bound, a)
                if db is None:
                    _err(UNBOUND, f"type variable '{a} is not declared")
                if isinstance(db, TermDecl):
                    _err(KIND_MISMATCH, f"{a!r} is a term variable, not a type")
                pat_subst_check(self, bound, n, s, db.local)
            case Arrow(dom=a, cod=b):
                self.kind(bound, n, a)
                self.kind(bound, n, b)
            case Forall(name=a, local=loc, level=k, body=b):
                for d in loc.entries:
                    if not isinstance(d, TypeDecl):
                        _err(
                            KIND_MISMATCH,
                            "kind context of a quantifier pattern must declare "
                            "only type variables",
                        )
                inner = insert(bound, TypeDecl(a, loc, k))
                self.kind(inner, max(n, k), b)
            case BoxT(local=loc, level=k, body=b):
                if k <= 0:
                    _err(LEVEL_VIOLATION, f"box type pattern at level {k}")
                inner = append(chop_lower(bound, k), loc)
                self.kind(inner, max(n, k), b)
            case IntT() | BoolT():
                pass
            case ListT(elem=e):
                self.kind(bound, n, e)
            case _:
                _err(KIND_MISMATCH, f"unsupported type pattern {type(p).__name__}")


def pat_subst_check(
    checker, bound: Context, n: int, sigma: tuple, phi: Context
) -> None:
    """Closure patterns: renames of bound variables, or nested patterns.

    Later domain types that depend on a name replaced by a non-rename
    pattern entry are rejected; renames accumulate into a mapping that
    keeps the domain's types aligned with the bound context.
    """
    if isinstance(checker, Context):
        checker = _PatChecker(checker)
    if len(sigma) != len(phi.entries):
        _err(
            ARITY_MISMATCH,
            f"closure pattern has {len(sigma)} entries, "
            f"domain declares {len(phi.entries)}",
        )
    m: dict = {}
    blocked: set = set()
    from .syntax import free_names, rename_free_in_context

    for ent, d in zip(sigma, phi.entries):
        k = d.level
        loc = rename_free_in_context(d.local, m)
        if free_names(loc) & blocked or (
            isinstance(d, TermDecl) and free_names(d.type) & blocked
        ):
            _err(
                TYPE_MISMATCH,
                f"domain entry {d.name!r} depends on a pattern-substituted "
                f"variable",
            )
        match ent, d:
            case (RenameTerm(name=y, level=k2), TermDecl(type=t)):
                if k2 != k:
                    _err(LEVEL_VIOLATION, f"rename for {d.name!r} at level {k2}")
                dy = lookup_decl(bound, y)
                if dy is None:
                    _err(UNBOUND, f"rename target {y!r} is not a bound variable")
                if not isinstance(dy, TermDecl) or dy.level != k:
                    _err(TYPE_MISMATCH, f"rename target {y!r} does not fit {d.name!r}")
                if not alpha_eq(dy.local, loc) or not alpha_eq(
                    dy.type, rename(t, m)
                ):
                    _err(
                        TYPE_MISMATCH,
                        f"rename target {y!r} has a different contextual type",
                    )
                m[d.name] = y
            case (RenameType(name=b, level=k2), TypeDecl()):
                if k2 != k:
                    _err(LEVEL_VIOLATION, f"rename for '{d.name} at level {k2}")
                db = lookup_decl(bound, b)
                if db is None:
                    _err(UNBOUND, f"rename target '{b} is not a bound variable")
                if isinstance(db, TermDecl) or db.level != k:
                    _err(TYPE_MISMATCH, f"rename target '{b} does not fit '{d.name}")
                if not alpha_eq(db.local, loc):
                    _err(
                        TYPE_MISMATCH,
                        f"rename target '{b} has a different kind context",
                    )
                m[d.name] = b
            case (CTerm(ctx_hat=hat, level=k2, term=body), TermDecl(type=t)):
                if k2 != k:
                    _err(LEVEL_VIOLATION, f"entry for {d.name!r} at level {k2}")
                loc2 = _match_hat_names(hat, loc)
                pairing = dict(
                    zip(
                        (e.name for e in loc.entries),
                        (e.name for e in loc2.entries),
                    )
                )
                inner = append(chop_lower(bound, k), loc2)
                checker.check(inner, max(n, k), body, rename(t, {**m, **pairing}))
                blocked.add(d.name)
            case (CType(ctx_hat=hat, level=k2, type=ty), TypeDecl()):
                if k2 != k:
                    _err(LEVEL_VIOLATION, f"entry for '{d.name} at level {k2}")
                loc2 = _match_hat_names(hat, loc, type_vars_only=True)
                inner = append(chop_lower(bound, k), loc2)
                checker.kind(inner, max(n, k), ty)
                blocked.add(d.name)
            case _:
                _err(
                    KIND_MISMATCH,
                    f"closure pattern entry {ent} does not fit {d.name!r}",
                )


def pattern_reflect(bound: Context, level: int, pattern: Term) -> Term:
    """The pattern as an ordinary boxed term over its bound context.

    Typing the reflected term in a context that declares the pattern
    variables as plain contextual variables independently validates
    the pattern rules (levels must be positive for the box to kind).
    """
    if level <= 0:
        raise ValueError("reflection needs a positive code level")
    return BoxE(hat_of(bound), level, pattern, local=bound)
