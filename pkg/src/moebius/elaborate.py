"""Surface-to-core elaboration.

The surface syntax lets the writer drop whatever the context determines:
lambda annotations, box binder types, let-box locals and levels, identity
closures, default box levels.  This pass restores all of it, producing core
terms that `typecheck.type_of` accepts or rejects.

It is bidirectional.  `check` pushes an expected type into the constructs
that omit annotations (boxes, bare lambdas, empty lists, branch bodies);
`synth` recovers types from annotated heads (signatures, annotated boxes,
let-box right-hand sides, scrutinees).  Elaboration only fills syntax in:
where it cannot see that two types agree (refined pattern branches, say) it
builds the term anyway and leaves the verdict to the checker, so a program
is never rejected here for a clash the checker would absolve.

Pattern variables need no signatures when each one first occurs in a
position whose type is forced (an argument of a bound function, an operand,
a checked box body); a variable whose first occurrence is in an inferring
position needs the explicit `(X : (ctx |-^n T)). box(...)` form.

The surface language does not shadow: a binder whose name is already bound
is an error, which keeps every elaboration scope a valid core context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import parser as P
from .contexts import append, chop_lower, id_subst, insert, lookup_decl, merge
from .substitution import apply_type, single_subst_type
from .syntax import (
    EMPTY,
    App,
    Arrow,
    BoolLit,
    BoolT,
    BoxE,
    BoxT,
    Branch,
    Case,
    Cons,
    Context,
    CTerm,
    CType,
    Fix,
    Forall,
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
    RenameTerm,
    RenameType,
    TApp,
    TLam,
    TVar,
    TermDecl,
    Tl,
    TypeConstraint,
    TypeDecl,
    Var,
    free_names,
    fresh_name,
    hat_of,
    level_of,
    rename,
)
from .typecheck import (
    ARITY_MISMATCH,
    CONTEXT_MALFORMED,
    KIND_MISMATCH,
    LEVEL_VIOLATION,
    TYPE_MISMATCH,
    UNBOUND,
    TypeCheckError,
    kind_check,
    type_eq,
    type_of,
)


def _err(kind: str, msg: str):
    raise TypeCheckError(kind, msg)


@dataclass(frozen=True)
class Definition:
    name: str
    sig: object  # Type
    term: object  # Term


@dataclass(frozen=True)
class Program:
    defs: tuple
    entry: object  # Term or None


class _Pat:
    """State for elaborating inside a pattern: the current bound context
    and level, the declared pattern variables, and the inferred ones."""

    __slots__ = ("level", "bound", "sigs", "acc")

    def __init__(self, level: int, bound: Context, sigs: dict, acc: dict):
        self.level = level
        self.bound = bound
        self.sigs = sigs
        self.acc = acc

    def at(self, level: int, bound: Context) -> "_Pat":
        return _Pat(level, bound, self.sigs, self.acc)

    def lookup(self, name: str):
        return self.sigs.get(name) or self.acc.get(name)


def _ctx(entries) -> Context:
    try:
        return Context(tuple(entries))
    except ValueError as exc:
        _err(CONTEXT_MALFORMED, str(exc))


def _grow(gamma: Context, decl) -> Context:
    if decl.name in gamma.names():
        _err(
            CONTEXT_MALFORMED,
            f"{decl.name!r} is already bound; the surface language does not shadow",
        )
    return insert(gamma, decl)


def _scope(gamma: Context, n: int, local: Context) -> Context:
    try:
        return append(chop_lower(gamma, n), local)
    except ValueError as exc:
        _err(CONTEXT_MALFORMED, str(exc))


def _default_level(local: Context) -> int:
    return max(level_of(local), 1)


def _verify_binders(binders, ctx: Context, what: str) -> None:
    if len(binders) != len(ctx.entries):
        _err(
            ARITY_MISMATCH,
            f"{what} names {len(binders)} binders, the context has {len(ctx.entries)}",
        )
    for b, d in zip(binders, ctx.entries):
        if b.is_type != isinstance(d, (TypeDecl, TypeConstraint)):
            _err(KIND_MISMATCH, f"binder {b.name!r} has the wrong sort for {d.name!r}")
        if b.level is not None and b.level != d.level:
            _err(
                LEVEL_VIOLATION,
                f"binder {b.name!r} written at level {b.level}, context says {d.level}",
            )


def rename_entries(ctx: Context, names) -> Context:
    """Rebuild `ctx` with its entries renamed positionally to `names`,
    rewriting the references later entries make to earlier ones."""
    names = list(names)
    if names == [d.name for d in ctx.entries]:
        return ctx
    m: dict = {}
    out = []
    for d, nn in zip(ctx.entries, names):
        local = rename(d.local, m) if m else d.local
        if isinstance(d, TermDecl):
            out.append(TermDecl(nn, local, d.level, rename(d.type, m) if m else d.type))
        elif isinstance(d, TypeDecl):
            out.append(TypeDecl(nn, local, d.level))
        else:
            _err(CONTEXT_MALFORMED, f"{d.name!r} is solved; it cannot be rebound")
        if d.name != nn:
            m[d.name] = nn
    return _ctx(out)


def _rename_map(ctx: Context, names) -> dict:
    return {
        d.name: nn for d, nn in zip(ctx.entries, names) if d.name != nn
    }


class _Elab:
    # ---- types ------------------------------------------------------------

    def elab_type(self, gamma: Context, st):
        match st:
            case P.STInt():
                return IntT()
            case P.STBool():
                return BoolT()
            case P.STList(elem=e):
                return ListT(self.elab_type(gamma, e))
            case P.STArrow(dom=d, cod=c):
                return Arrow(self.elab_type(gamma, d), self.elab_type(gamma, c))
            case P.STVar(name=a, spans=spans):
                d = lookup_decl(gamma, a)
                if d is None:
                    _err(UNBOUND, f"type variable '{a} is not declared")
                if isinstance(d, TermDecl):
                    _err(KIND_MISMATCH, f"{a!r} is a term variable, not a type")
                if spans is None:
                    sub = id_subst(hat_of(d.local))
                else:
                    sub = self._spans(gamma, spans, d)
                return TVar(a, sub)
            case P.STForall(name=a, annot=ann, body=b):
                loc = self.elab_ctx(gamma, ann.local)
                n = ann.level if ann.level is not None else _default_level(loc)
                inner = _grow(gamma, TypeDecl(a, loc, n))
                return Forall(a, loc, n, self.elab_type(inner, b))
            case P.STBoxT(ctx=entries, level=lvl, body=b):
                psi = self.elab_ctx(gamma, entries)
                n = lvl if lvl is not None else _default_level(psi)
                if n <= 0:
                    _err(LEVEL_VIOLATION, "a box type must sit at a positive level")
                return BoxT(psi, n, self.elab_type(_scope(gamma, n, psi), b))
            case _:
                raise TypeError(f"elab_type: unexpected {st!r}")

    def elab_ctx(self, gamma: Context, sdecls) -> Context:
        entries = []
        cur = gamma
        for d in sdecls:
            loc = self.elab_ctx(cur, d.annot.local)
            lvl = d.annot.level if d.annot.level is not None else _default_level(loc)
            if d.annot.level is None and not d.annot.local and d.annot.type is not None:
                lvl = 0  # a plain `x : T` annotation
            if d.annot.type is None:
                if not d.is_type:
                    _err(KIND_MISMATCH, f"{d.name!r} is a term name but has kind *")
                ent = TypeDecl(d.name, loc, lvl)
            else:
                if d.is_type:
                    _err(KIND_MISMATCH, f"'{d.name} is a type name but has a type")
                ty = self.elab_type(_scope(cur, lvl, loc), d.annot.type)
                ent = TermDecl(d.name, loc, lvl, ty)
            entries.append(ent)
            cur = _grow(cur, ent)
        return _ctx(entries)

    # ---- closure entries ----------------------------------------------------

    def _spans(self, gamma: Context, spans, d) -> tuple:
        dom = d.local
        if len(spans) != len(dom.entries):
            _err(
                ARITY_MISMATCH,
                f"{d.name!r} expects {len(dom.entries)} closure entries, got {len(spans)}",
            )
        return tuple(
            self._entry(gamma, span, ent) for span, ent in zip(spans, dom.entries)
        )

    def _entry(self, gamma: Context, span, ent):
        tagged = P.reparse_entry(span)
        is_type_ent = isinstance(ent, (TypeDecl, TypeConstraint))
        match tagged:
            case ("name", y):
                if is_type_ent:
                    _err(KIND_MISMATCH, f"closure entry for '{ent.name} must be a type")
                dy = lookup_decl(gamma, y)
                if isinstance(dy, TermDecl) and dy.level == ent.level:
                    return RenameTerm(y, ent.level)
                return self._payload(gamma, span, ent, None)
            case ("tname", b):
                if not is_type_ent:
                    _err(KIND_MISMATCH, f"closure entry for {ent.name!r} must be a term")
                db = lookup_decl(gamma, b)
                if isinstance(db, (TypeDecl, TypeConstraint)) and db.level == ent.level:
                    return RenameType(b, ent.level)
                return self._payload(gamma, span, ent, None)
            case ("closure", binders, payload):
                return self._payload(gamma, payload, ent, binders)
            case ("payload", toks):
                return self._payload(gamma, toks, ent, None)

    def _payload(self, gamma: Context, tokens, ent, binders):
        if binders is None:
            loc = ent.local
        else:
            _verify_binders(binders, ent.local, "closure entry")
            loc = rename_entries(ent.local, [b.name for b in binders])
        scope = _scope(gamma, ent.level, loc)
        if isinstance(ent, TermDecl):
            core, _ = self.synth(scope, P.parse_span_term(tokens))
            return CTerm(hat_of(loc), ent.level, core)
        ty = self.elab_type(scope, P.parse_span_type(tokens))
        return CType(hat_of(loc), ent.level, ty)

    # ---- terms: inference ---------------------------------------------------

    def synth(self, gamma: Context, s, pat: Optional[_Pat] = None):
        match s:
            case P.SInt(value=v):
                return IntLit(v), IntT()
            case P.SBool(value=v):
                return BoolLit(v), BoolT()
            case P.SVar():
                return self._var(gamma, s, pat, None)
            case P.SLam(name=x, ty=sty, body=b):
                if sty is None:
                    _err(
                        TYPE_MISMATCH,
                        f"parameter {x!r} needs a type annotation here",
                    )
                ty = self.elab_type(gamma, sty)
                g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, ty))
                eb, tb = self.synth(g2, b, p2)
                return Lam(x, ty, eb), Arrow(ty, tb)
            case P.SApp(fn=P.SLam(name=x, ty=None, body=b), arg=a):
                # a redex: the argument's type annotates the parameter
                ea, ta = self.synth(gamma, a, pat)
                g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, ta))
                eb, tb = self.synth(g2, b, p2)
                return App(Lam(x, ta, eb), ea), tb
            case P.SApp(fn=f, arg=a):
                ef, tf = self.synth(gamma, f, pat)
                match tf:
                    case Arrow(dom=dm, cod=cd):
                        return App(ef, self.check(gamma, a, dm, pat)), cd
                    case Forall():
                        _err(
                            TYPE_MISMATCH,
                            "polymorphic value needs an explicit type "
                            "application here, e.g. f (. T)",
                        )
                    case _:
                        _err(TYPE_MISMATCH, f"cannot apply a value of type {tf}")
            case P.STyApp(fn=f, binders=bs, ty=sty):
                ef, tf = self.synth(gamma, f, pat)
                match tf:
                    case Forall(name=a, local=loc, level=n, body=body):
                        _verify_binders(bs, loc, "type application")
                        loc2 = rename_entries(loc, [b.name for b in bs])
                        ty = self.elab_type(_scope(gamma, n, loc2), sty)
                        core = TApp(ef, hat_of(loc2), n, ty)
                        return core, single_subst_type(hat_of(loc2), n, ty, a, body)
                    case _:
                        _err(TYPE_MISMATCH, f"cannot type-apply a value of type {tf}")
            case P.STFn(name=a, annot=ann, body=b):
                if ann is None:
                    _err(
                        TYPE_MISMATCH,
                        f"type parameter '{a} needs a kind annotation here",
                    )
                loc = self.elab_ctx(gamma, ann.local)
                n = ann.level if ann.level is not None else _default_level(loc)
                g2, p2 = self._bind(gamma, pat, TypeDecl(a, loc, n))
                eb, tb = self.synth(g2, b, p2)
                return TLam(a, n, eb, local=loc), Forall(a, loc, n, tb)
            case P.SBoxE(binders=bs, level=lvl, body=b):
                for bind in bs:
                    if bind.annot is None:
                        _err(
                            TYPE_MISMATCH,
                            f"box binder {bind.name!r} needs an annotation here "
                            "(the box's type is not known from context)",
                        )
                sdecls = tuple(
                    P.SDecl(bind.name, bind.is_type, bind.annot) for bind in bs
                )
                local = self.elab_ctx(gamma, sdecls)
                _verify_binders(bs, local, "box")
                n = lvl if lvl is not None else _default_level(local)
                if n <= 0:
                    _err(LEVEL_VIOLATION, "box must sit at a positive level")
                p2 = pat.at(n, local) if pat is not None else None
                eb, tb = self.synth(_scope(gamma, n, local), b, p2)
                return BoxE(hat_of(local), n, eb, local=local), BoxT(local, n, tb)
            case P.SLetBox():
                return self._letbox(gamma, s, None, pat)
            case P.SLet(name=x, bound=e1, body=e2):
                eb, tb = self.synth(gamma, e1, pat)
                g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, tb))
                ec, tc = self.synth(g2, e2, p2)
                return App(Lam(x, tb, ec), eb), tc
            case P.SIf(cond=c, then=t, els=e):
                ec = self.check(gamma, c, BoolT(), pat)
                et, tt = self.synth(gamma, t, pat)
                ee = self.check(gamma, e, tt, pat)
                return If(ec, et, ee), tt
            case P.SPrim(op=o, lhs=a, rhs=b):
                ea = self.check(gamma, a, IntT(), pat)
                eb = self.check(gamma, b, IntT(), pat)
                return PrimOp(o, ea, eb), BoolT() if o in ("=", "<=") else IntT()
            case P.SCons(head=h, tail=t):
                eh, th = self.synth(gamma, h, pat)
                et = self.check(gamma, t, ListT(th), pat)
                return Cons(eh, et), ListT(th)
            case P.SNil():
                _err(
                    TYPE_MISMATCH,
                    "an empty list needs an annotation here, e.g. ([] : int list)",
                )
            case P.SHd(arg=a):
                ea, s2 = self._elem(gamma, a, pat)
                return Hd(ea), s2
            case P.STl(arg=a):
                ea, s2 = self._elem(gamma, a, pat)
                return Tl(ea), ListT(s2)
            case P.SIsNil(arg=a):
                ea, _ = self._elem(gamma, a, pat)
                return IsNil(ea), BoolT()
            case P.SFixE(name=f, ty=sty, body=b):
                ty = self.elab_type(gamma, sty)
                g2, p2 = self._bind(gamma, pat, TermDecl(f, EMPTY, 0, ty))
                return Fix(f, ty, self.check(g2, b, ty, p2)), ty
            case P.SAsc(term=e, ty=sty):
                ty = self.elab_type(gamma, sty)
                return self.check(gamma, e, ty, pat), ty
            case P.SCaseE():
                return self._case(gamma, s, None, pat)
            case P.SMatchL():
                return self._matchl(gamma, s, None, pat)
            case _:
                raise TypeError(f"synth: unexpected {s!r}")

    def _elem(self, gamma, sarg, pat):
        ea, ta = self.synth(gamma, sarg, pat)
        match ta:
            case ListT(elem=s):
                return ea, s
            case _:
                _err(TYPE_MISMATCH, f"expected a list, got {ta}")

    # ---- terms: checking ------------------------------------------------------

    def check(self, gamma: Context, s, want, pat: Optional[_Pat] = None):
        match s:
            case P.SVar():
                core, _ = self._var(gamma, s, pat, want)
                return core
            case P.SLam(name=x, ty=sty, body=b):
                match want:
                    case Arrow(dom=dm, cod=cd):
                        ty = dm if sty is None else self.elab_type(gamma, sty)
                        g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, ty))
                        return Lam(x, ty, self.check(g2, b, cd, p2))
            case P.STFn(name=a, annot=ann, body=b):
                if ann is None:
                    match want:
                        case Forall(name=a2, local=loc, level=n, body=fb):
                            g2, p2 = self._bind(gamma, pat, TypeDecl(a, loc, n))
                            fb2 = rename(fb, {a2: a}) if a2 != a else fb
                            eb = self.check(g2, b, fb2, p2)
                            return TLam(a, n, eb, local=loc)
            case P.SBoxE(binders=bs, level=lvl, body=b):
                if any(bind.annot is not None for bind in bs):
                    # written annotations win; the checker compares the result
                    if not all(bind.annot is not None for bind in bs):
                        _err(
                            TYPE_MISMATCH,
                            "annotate all binders of a box or none of them",
                        )
                else:
                    match want:
                        case BoxT(local=psi, level=n, body=t):
                            if lvl is not None and lvl != n:
                                _err(
                                    LEVEL_VIOLATION,
                                    f"box written at level {lvl}, expected {n}",
                                )
                            _verify_binders(bs, psi, "box")
                            names = [bind.name for bind in bs]
                            psi2 = rename_entries(psi, names)
                            t2 = rename(t, _rename_map(psi, names))
                            p2 = pat.at(n, psi2) if pat is not None else None
                            eb = self.check(_scope(gamma, n, psi2), b, t2, p2)
                            return BoxE(hat_of(psi2), n, eb, local=psi2)
            case P.SNil():
                match want:
                    case ListT(elem=t):
                        return Nil(t)
            case P.SCons(head=h, tail=t):
                match want:
                    case ListT(elem=te):
                        eh = self.check(gamma, h, te, pat)
                        return Cons(eh, self.check(gamma, t, want, pat))
            case P.SIf(cond=c, then=t, els=e):
                ec = self.check(gamma, c, BoolT(), pat)
                return If(
                    ec,
                    self.check(gamma, t, want, pat),
                    self.check(gamma, e, want, pat),
                )
            case P.SApp(fn=P.SLam(name=x, ty=None, body=b), arg=a):
                ea, ta = self.synth(gamma, a, pat)
                g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, ta))
                return App(Lam(x, ta, self.check(g2, b, want, p2)), ea)
            case P.SLet(name=x, bound=e1, body=e2):
                eb, tb = self.synth(gamma, e1, pat)
                g2, p2 = self._bind(gamma, pat, TermDecl(x, EMPTY, 0, tb))
                return App(Lam(x, tb, self.check(g2, e2, want, p2)), eb)
            case P.SLetBox():
                core, _ = self._letbox(gamma, s, want, pat)
                return core
            case P.SCaseE():
                core, _ = self._case(gamma, s, want, pat)
                return core
            case P.SMatchL():
                core, _ = self._matchl(gamma, s, want, pat)
                return core
        core, _ = self.synth(gamma, s, pat)
        return core

    # ---- shared elaboration of the bigger forms ----------------------------

    def _bind(self, gamma: Context, pat: Optional[_Pat], decl):
        g2 = _grow(gamma, decl)
        if pat is None:
            return g2, None
        return g2, pat.at(pat.level, _grow(pat.bound, decl))

    def _var(self, gamma: Context, s, pat: Optional[_Pat], want):
        d = lookup_decl(gamma, s.name)
        if d is None and pat is not None:
            d = pat.lookup(s.name)
            if d is None:
                if want is None:
                    _err(
                        UNBOUND,
                        f"pattern variable {s.name!r} needs an explicit signature "
                        "(its type is not determined by its position)",
                    )
                d = TermDecl(s.name, pat.bound, pat.level, want)
                pat.acc[s.name] = d
        if d is None:
            _err(UNBOUND, f"variable {s.name!r} is not declared")
        if not isinstance(d, TermDecl):
            _err(KIND_MISMATCH, f"{s.name!r} is a type variable, not a term")
        if s.spans is None:
            sub = id_subst(hat_of(d.local))
        else:
            sub = self._spans(gamma, s.spans, d)
        return Var(s.name, sub), apply_type(sub, hat_of(d.local), d.type)

    def _letbox(self, gamma: Context, s, want, pat: Optional[_Pat]):
        eb, tb = self.synth(gamma, s.bound, pat)
        match tb:
            case BoxT(local=phi, level=k, body=t):
                _verify_binders(s.binders, phi, "let box")
                names = [b.name for b in s.binders]
                phi2 = rename_entries(phi, names)
                t2 = rename(t, _rename_map(phi, names))
                decl = TermDecl(s.name, phi2, k, t2)
                g2, p2 = self._bind(gamma, pat, decl)
                if want is None:
                    ec, tc = self.synth(g2, s.body, p2)
                else:
                    ec, tc = self.check(g2, s.body, want, p2), want
                return LetBox(hat_of(phi2), k, s.name, eb, ec), tc
            case _:
                _err(TYPE_MISMATCH, f"let box expects code, got {tb}")

    def _case(self, gamma: Context, s, want, pat: Optional[_Pat]):
        if s.annot is not None:
            at = self.elab_type(gamma, s.annot)
            if not isinstance(at, BoxT):
                _err(TYPE_MISMATCH, "a case annotation must be a box type")
            es = self.check(gamma, s.scrut, at, pat)
        else:
            es, ts = self.synth(gamma, s.scrut, pat)
            if not isinstance(ts, BoxT):
                _err(TYPE_MISMATCH, f"case scrutinee must be code, got {ts}")
            at = ts
        branches = []
        cand = want
        for sbr in s.branches:
            br, tbody = self._branch(gamma, sbr, at, cand, pat)
            branches.append(br)
            if cand is None:
                try:
                    kind_check(gamma, tbody)
                    cand = tbody
                except TypeCheckError:
                    pass
        if cand is None:
            _err(
                TYPE_MISMATCH,
                "cannot infer a result type for this case; ascribe it",
            )
        return Case(es, at, tuple(branches)), cand

    def _branch(self, gamma: Context, sbr, at, bwant, pat_outer: Optional[_Pat]):
        if sbr.annot is not None:
            bt = self.elab_type(gamma, sbr.annot)
            if not isinstance(bt, BoxT):
                _err(TYPE_MISMATCH, "a branch annotation must be a box type")
            bctx, bk, btype = bt.local, bt.level, bt.body
        else:
            bctx, bk, btype = at.local, at.level, at.body
        if sbr.level is not None and sbr.level != bk:
            _err(
                LEVEL_VIOLATION,
                f"pattern written at level {sbr.level}, branch is at {bk}",
            )
        _verify_binders(sbr.binders, bctx, "branch pattern")
        names = [b.name for b in sbr.binders]
        bctx2 = rename_entries(bctx, names)
        btype2 = rename(btype, _rename_map(bctx, names))
        sig_entries = ()
        sigs: dict = {}
        if sbr.sigs is not None:
            sig_entries = self.elab_ctx(gamma, sbr.sigs).entries
            sigs = {d.name: d for d in sig_entries}
        pstate = _Pat(bk, bctx2, sigs, {})
        epat = self.check(_scope(gamma, bk, bctx2), sbr.pattern, btype2, pstate)
        pv_entries = list(sig_entries) + list(pstate.acc.values())
        pv_entries.sort(key=lambda d: -d.level)
        pv = _ctx(pv_entries)
        try:
            benv = merge(gamma, pv)
        except ValueError as exc:
            _err(CONTEXT_MALFORMED, str(exc))
        if bwant is None:
            ebody, tbody = self.synth(benv, sbr.body, pat_outer)
        else:
            ebody, tbody = self.check(benv, sbr.body, bwant, pat_outer), bwant
        return (
            Branch(pv, hat_of(bctx2), epat, bctx2, bk, btype2, ebody),
            tbody,
        )

    def _matchl(self, gamma: Context, s, want, pat: Optional[_Pat]):
        es, ts = self.synth(gamma, s.scrut, pat)
        match ts:
            case ListT(elem=t):
                pass
            case _:
                _err(TYPE_MISMATCH, f"match expects a list, got {ts}")
        if want is None:
            en, tn = self.synth(gamma, s.nil_body, pat)
        else:
            en, tn = self.check(gamma, s.nil_body, want, pat), want
        g2, p2 = self._bind(gamma, pat, TermDecl(s.hname, EMPTY, 0, t))
        g3, p3 = self._bind(g2, p2, TermDecl(s.tname, EMPTY, 0, ListT(t)))
        ec = self.check(g3, s.cons_body, tn, p3)
        avoid = (
            gamma.names()
            | {s.hname, s.tname}
            | free_names(en)
            | free_names(ec)
        )
        v = Var(fresh_name("l0", avoid))
        inner = If(
            IsNil(v),
            en,
            App(App(Lam(s.hname, t, Lam(s.tname, ListT(t), ec)), Hd(v)), Tl(v)),
        )
        return App(Lam(v.name, ListT(t), inner), es), tn


# ---------------------------------------------------------------------------
# programs


def elaborate_term(gamma: Context, s):
    """Core term and type for a surface term in inferring position."""
    return _Elab().synth(gamma, s)


def elaborate_type(gamma: Context, st):
    return _Elab().elab_type(gamma, st)


def _elab_def(elab: _Elab, gamma: Context, sdef) -> Definition:
    if sdef.sig is None:
        if sdef.params:
            _err(
                TYPE_MISMATCH,
                f"definition {sdef.name!r} has parameters and needs a signature",
            )
        core, ty = elab.synth(gamma, sdef.body)
        return Definition(sdef.name, ty, core)
    sig = elab.elab_type(gamma, sdef.sig)
    kind_check(gamma, sig)
    scope = _grow(gamma, TermDecl(sdef.name, EMPTY, 0, sig))
    wraps = []
    t = sig
    for pname, is_tick in sdef.params:
        if is_tick:
            if not isinstance(t, Forall):
                _err(
                    TYPE_MISMATCH,
                    f"parameter '{pname} of {sdef.name!r} does not match a "
                    "forall in the signature",
                )
            body = rename(t.body, {t.name: pname}) if t.name != pname else t.body
            scope = _grow(scope, TypeDecl(pname, t.local, t.level))
            wraps.append(("tlam", pname, t.local, t.level))
            t = body
        else:
            while isinstance(t, Forall):
                a2 = fresh_name(t.name, scope.names())
                body = rename(t.body, {t.name: a2}) if a2 != t.name else t.body
                scope = _grow(scope, TypeDecl(a2, t.local, t.level))
                wraps.append(("tlam", a2, t.local, t.level))
                t = body
            if not isinstance(t, Arrow):
                _err(
                    TYPE_MISMATCH,
                    f"parameter {pname!r} of {sdef.name!r} does not match an "
                    "arrow in the signature",
                )
            scope = _grow(scope, TermDecl(pname, EMPTY, 0, t.dom))
            wraps.append(("lam", pname, t.dom))
            t = t.cod
    body = elab.check(scope, sdef.body, t)
    for w in reversed(wraps):
        if w[0] == "lam":
            body = Lam(w[1], w[2], body)
        else:
            body = TLam(w[1], w[3], body, local=w[2])
    if sdef.name in free_names(body):
        body = Fix(sdef.name, sig, body)
    return Definition(sdef.name, sig, body)


def elaborate_program(sprog) -> Program:
    elab = _Elab()
    gamma = EMPTY
    defs = []
    for sd in sprog.defs:
        d = _elab_def(elab, gamma, sd)
        defs.append(d)
        gamma = _grow(gamma, TermDecl(d.name, EMPTY, 0, d.sig))
    entry = None
    if sprog.entry is not None:
        entry, _ = elab.synth(gamma, sprog.entry)
    return Program(tuple(defs), entry)


def check_program(prog: Program) -> list:
    """Re-check an elaborated program from scratch; returns (name, type)
    pairs, the entry expression reported as `it`."""
    gamma = EMPTY
    out = []
    for d in prog.defs:
        t = type_of(gamma, d.term)
        if not type_eq(gamma, t, d.sig):
            _err(
                TYPE_MISMATCH,
                f"definition {d.name!r} has type {t}, its signature says {d.sig}",
            )
        gamma = insert(gamma, TermDecl(d.name, EMPTY, 0, d.sig))
        out.append((d.name, d.sig))
    if prog.entry is not None:
        out.append(("it", type_of(gamma, prog.entry)))
    return out


def link(prog: Program):
    """One closed term for the whole program: each definition becomes an
    immediately applied lambda around the entry expression."""
    if prog.entry is None:
        raise ValueError("program has no entry expression")
    e = prog.entry
    for d in reversed(prog.defs):
        e = App(Lam(d.name, d.sig, e), d.term)
    return e
