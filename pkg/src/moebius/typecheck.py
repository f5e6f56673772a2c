"""Kind/type checking with constraint contexts.

Judgments follow the declarative rules, read algorithmically:

  * wf_context validates level bounds, local scoping and acyclicity of
    constraint solutions;
  * kind_check / type_of synthesize kinds and types;
  * subst_check validates a substitution against its domain context,
    entry by entry from the right, chopping the already-checked prefix
    at each entry's level;
  * type_eq / context_eq / subst_eq implement structural equality
    modulo constraints: solved variables unfold through their closures,
    and everything is equal under the contradiction marker.

Failures raise TypeCheckError carrying one of the `kind` constants.
Setting `constraint_lookup_enabled = False` turns off solution
unfolding in the equality judgments (used to demonstrate that pattern
refinement is load-bearing).
"""

from __future__ import annotations

from .contexts import (
    append,
    chop_lower,
    chop_upper,
    id_subst,
    insert,
    lookup_decl,
    merge,
)
from .substitution import (
    append_subst,
    apply_context,
    apply_type,
    chop_lower_subst,
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
    EMPTY,
    erase,
    Fix,
    Forall,
    free_names,
    fresh_name,
    hat_of,
    HatVar,
    Hd,
    If,
    IntLit,
    IntT,
    IsNil,
    Lam,
    LetBox,
    level_of,
    ListT,
    Nil,
    PrimOp,
    rename,
    rename_context,
    rename_free_in_context,
    RenameTerm,
    RenameType,
    TApp,
    Term,
    TermDecl,
    TLam,
    Tl,
    TVar,
    Type,
    TypeConstraint,
    TypeDecl,
    Var,
)

# error kinds
UNBOUND = "unbound"
LEVEL_VIOLATION = "levelViolation"
KIND_MISMATCH = "kindMismatch"
TYPE_MISMATCH = "typeMismatch"
CONTEXT_MALFORMED = "contextMalformed"
CIRCULAR_CONSTRAINT = "circularConstraint"
ARITY_MISMATCH = "arityMismatch"

# flipping this off disables solution unfolding in the equality
# judgments; refinement-dependent programs then fail to check
constraint_lookup_enabled = True


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


def _err(kind: str, msg: str):
    raise TypeCheckError(kind, msg)


# ---------------------------------------------------------------------------
# well-formed contexts


def wf_context(gamma: Context) -> None:
    """Levels bounded, locals scoped, constraint solutions acyclic."""
    # cycle scan first: a cyclic solution graph would also trip the pointwise
    # scope checks, but the cycle is the real diagnosis
    _check_acyclic(gamma)
    for i, d in enumerate(gamma.entries):
        prefix = Context(gamma.entries[:i], gamma.contradiction)
        n = d.level
        if level_of(d.local) > n:
            _err(
                LEVEL_VIOLATION,
                f"local context of {d.name!r} reaches level {level_of(d.local)} > {n}",
            )
        try:
            scope = append(chop_lower(prefix, n), d.local)
        except ValueError as exc:
            _err(CONTEXT_MALFORMED, str(exc))
        wf_context(scope)
        match d:
            case TermDecl(type=t):
                kind_check(scope, t)
            case TypeConstraint(solution_hat=hat, solution=sol):
                if tuple(v.name for v in hat) != tuple(
                    e.name for e in d.local.entries
                ):
                    _err(
                        CONTEXT_MALFORMED,
                        f"solution binder of {d.name!r} does not erase its local",
                    )
                kind_check(scope, sol)
            case TypeDecl():
                pass


def _check_acyclic(gamma: Context) -> None:
    solutions = {
        d.name: d.solution
        for d in gamma.entries
        if isinstance(d, TypeConstraint)
    }
    state: dict = {}

    def visit(name: str) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            _err(CIRCULAR_CONSTRAINT, f"solution cycle through {name!r}")
        state[name] = 1
        for dep in free_names(solutions[name]) & solutions.keys():
            visit(dep)
        state[name] = 2

    for name in solutions:
        visit(name)


# ---------------------------------------------------------------------------
# kinding


def kind_check(gamma: Context, t: Type) -> None:
    match t:
        case TVar(name=a, subst=s):
            d = lookup_decl(gamma, a)
            if d is None:
                _err(UNBOUND, f"type variable '{a} is not declared")
            if isinstance(d, TermDecl):
                _err(KIND_MISMATCH, f"{a!r} is a term variable, not a type")
            subst_check(gamma, s, d.local)
        case Arrow(dom=a, cod=b):
            kind_check(gamma, a)
            kind_check(gamma, b)
        case Forall(name=a, local=loc, level=n, body=b):
            for d in loc.entries:
                if not isinstance(d, TypeDecl):
                    _err(
                        CONTEXT_MALFORMED,
                        f"kind context of '{a} must declare only type variables",
                    )
            scope = _scoped(gamma, n, loc)
            wf_context(scope)
            a2, (b2,) = _fresh_decl_name(gamma, a, [b])
            kind_check(insert(gamma, TypeDecl(a2, loc, n)), b2)
        case BoxT(local=loc, level=n, body=b):
            if n <= 0:
                _err(LEVEL_VIOLATION, f"box type must sit at level > 0, got {n}")
            loc2, (b2,) = _fresh_local_vs(gamma, loc, [b])
            scope = _scoped(gamma, n, loc2)
            wf_context(scope)
            kind_check(scope, b2)
        case IntT() | BoolT():
            pass
        case ListT(elem=e):
            kind_check(gamma, e)
        case _:
            raise TypeError(f"kind_check: unexpected {t!r}")


def _scoped(gamma: Context, n: int, local: Context) -> Context:
    """chop_lower(gamma, n) ++ local, surfacing malformedness."""
    try:
        return append(chop_lower(gamma, n), local)
    except ValueError as exc:
        _err(CONTEXT_MALFORMED, str(exc))


def _fresh_decl_name(gamma: Context, name: str, bodies):
    """Pick a name not clashing with gamma for a new declaration."""
    if name not in gamma.names():
        return name, list(bodies)
    avoid = set(gamma.names())
    for b in bodies:
        avoid |= free_names(b)
    new = fresh_name(name, avoid)
    return new, [rename(b, {name: new}) for b in bodies]


def _fresh_local_vs(gamma: Context, local: Context, bodies):
    """Rename a local context's names away from gamma's."""
    clashing = [d.name for d in local.entries if d.name in gamma.names()]
    if not clashing:
        return local, list(bodies)
    avoid = set(gamma.names()) | local.names()
    for b in bodies:
        avoid |= free_names(b)
    mapping = {}
    for n in clashing:
        new = fresh_name(n, avoid)
        avoid.add(new)
        mapping[n] = new
    return rename_context(local, mapping), [rename(b, mapping) for b in bodies]


# ---------------------------------------------------------------------------
# constraint unfolding


def force(gamma: Context, t: Type) -> Type:
    """Unfold solved variables at the head."""
    while (
        isinstance(t, TVar)
        and constraint_lookup_enabled
        and isinstance(d := lookup_decl(gamma, t.name), TypeConstraint)
    ):
        t = apply_type(t.subst, d.solution_hat, d.solution)
    return t


def zonk(gamma: Context, t: Type) -> Type:
    """Deeply resolve solved variables everywhere in a type."""
    t = force(gamma, t)
    match t:
        case TVar(name=a, subst=s):
            return TVar(a, _zonk_subst(gamma, s))
        case Arrow(dom=d, cod=c):
            return Arrow(zonk(gamma, d), zonk(gamma, c))
        case Forall(name=a, local=loc, level=n, body=b):
            return Forall(a, loc, n, zonk(gamma, b))
        case BoxT(local=loc, level=n, body=b):
            return BoxT(_zonk_ctx(gamma, loc), n, zonk(gamma, b))
        case ListT(elem=e):
            return ListT(zonk(gamma, e))
        case _:
            return t


def _zonk_subst(gamma: Context, s: tuple) -> tuple:
    out = []
    for ent in s:
        match ent:
            case CType(ctx_hat=h, level=k, type=ty):
                out.append(CType(h, k, zonk(gamma, ty)))
            case _:
                out.append(ent)
    return tuple(out)


def _zonk_ctx(gamma: Context, ctx: Context) -> Context:
    out = []
    for d in ctx.entries:
        match d:
            case TermDecl(name=x, local=loc, level=n, type=t):
                out.append(TermDecl(x, _zonk_ctx(gamma, loc), n, zonk(gamma, t)))
            case _:
                out.append(d)
    return Context(tuple(out), ctx.contradiction)


# ---------------------------------------------------------------------------
# typing


def type_of(gamma: Context, e: Term) -> Type:
    match e:
        case Var(name=x, subst=s):
            d = lookup_decl(gamma, x)
            if d is None:
                _err(UNBOUND, f"variable {x!r} is not declared")
            if not isinstance(d, TermDecl):
                _err(KIND_MISMATCH, f"{x!r} is a type variable, not a term")
            subst_check(gamma, s, d.local)
            return apply_type(s, hat_of(d.local), d.type)
        case Lam(name=x, ty=ty, body=b):
            if ty is None:
                raise ValueError("lambda missing its annotation (unelaborated term)")
            kind_check(gamma, ty)
            x2, (b2,) = _fresh_decl_name(gamma, x, [b])
            cod = type_of(insert(gamma, TermDecl(x2, EMPTY, 0, ty)), b2)
            return Arrow(ty, cod)
        case App(fn=f, arg=a):
            tf = force(gamma, type_of(gamma, f))
            ta = type_of(gamma, a)
            match tf:
                case Arrow(dom=s, cod=t):
                    if not type_eq(gamma, ta, s):
                        _err(
                            TYPE_MISMATCH,
                            f"argument has type {ta}, function expects {s}",
                        )
                    return t
                case _ if gamma.contradiction:
                    return IntT()
                case _:
                    _err(TYPE_MISMATCH, f"cannot apply a value of type {tf}")
        case TLam(name=a, level=n, body=b, local=loc):
            if loc is None:
                raise ValueError("type lambda missing its kind context (unelaborated)")
            scope = _scoped(gamma, n, loc)
            wf_context(scope)
            a2, (b2,) = _fresh_decl_name(gamma, a, [b])
            cod = type_of(insert(gamma, TypeDecl(a2, loc, n)), b2)
            return Forall(a2, loc, n, cod)
        case TApp(fn=f, ctx_hat=hat, level=n, arg=ty):
            tf = force(gamma, type_of(gamma, f))
            match tf:
                case Forall(name=a, local=loc, level=n2, body=s):
                    if n != n2:
                        _err(
                            LEVEL_VIOLATION,
                            f"type argument at level {n}, abstraction at {n2}",
                        )
                    loc2 = _match_hat_names(hat, loc, type_vars_only=True)
                    kind_check(_scoped(gamma, n, loc2), ty)
                    from .substitution import single_subst_type

                    return single_subst_type(hat, n, ty, a, s)
                case _ if gamma.contradiction:
                    return IntT()
                case _:
                    _err(TYPE_MISMATCH, f"cannot type-apply a value of type {tf}")
        case BoxE(ctx_hat=hat, level=n, body=b, local=loc):
            if loc is None:
                raise ValueError("box missing its local context (unelaborated term)")
            if n <= 0:
                _err(LEVEL_VIOLATION, f"box must sit at level > 0, got {n}")
            if tuple(v.name for v in hat) != tuple(d.name for d in loc.entries):
                raise ValueError("box binder does not erase its local context")
            loc2, (b2,) = _fresh_local_vs(gamma, loc, [b])
            scope = _scoped(gamma, n, loc2)
            wf_context(scope)
            t = type_of(scope, b2)
            return BoxT(loc2, n, t)
        case LetBox(ctx_hat=hat, level=n, name=u, bound=e1, body=e2):
            t1 = force(gamma, type_of(gamma, e1))
            match t1:
                case BoxT(local=loc, level=k, body=s):
                    if k != n:
                        _err(
                            LEVEL_VIOLATION,
                            f"let box binder at level {n}, bound code at {k}",
                        )
                    loc2 = _match_hat_names(hat, loc)
                    u2, (e2b,) = _fresh_decl_name(gamma, u, [e2])
                    s2 = rename(s, dict(zip((d.name for d in loc.entries),
                                            (d.name for d in loc2.entries))))
                    return type_of(
                        insert(gamma, TermDecl(u2, loc2, n, s2)), e2b
                    )
                case _ if gamma.contradiction:
                    loc2 = _dead_local(hat)
                    u2, (e2b,) = _fresh_decl_name(gamma, u, [e2])
                    return type_of(
                        insert(gamma, TermDecl(u2, loc2, n, IntT())), e2b
                    )
                case _:
                    _err(TYPE_MISMATCH, f"let box expects code, got {t1}")
        case Case():
            return _type_of_case(gamma, e)
        case IntLit():
            return IntT()
        case BoolLit():
            return BoolT()
        case PrimOp(op=o, lhs=a, rhs=b):
            for side in (a, b):
                ts = type_of(gamma, side)
                if not type_eq(gamma, ts, IntT()):
                    _err(TYPE_MISMATCH, f"operator {o!r} needs int, got {ts}")
            return BoolT() if o in ("=", "<=") else IntT()
        case If(cond=c, then=t, els=f):
            tc = type_of(gamma, c)
            if not type_eq(gamma, tc, BoolT()):
                _err(TYPE_MISMATCH, f"condition has type {tc}, expected bool")
            tt = type_of(gamma, t)
            tf = type_of(gamma, f)
            if not type_eq(gamma, tt, tf):
                _err(TYPE_MISMATCH, f"branches disagree: {tt} vs {tf}")
            return tt
        case Nil(elem=t):
            if t is None:
                raise ValueError("nil missing its element type (unelaborated term)")
            kind_check(gamma, t)
            return ListT(t)
        case Cons(head=h, tail=tl):
            th = type_of(gamma, h)
            tt = force(gamma, type_of(gamma, tl))
            match tt:
                case ListT(elem=s):
                    if not type_eq(gamma, th, s):
                        _err(TYPE_MISMATCH, f"cons of {th} onto {tt}")
                    return tt
                case _ if gamma.contradiction:
                    return ListT(th)
                case _:
                    _err(TYPE_MISMATCH, f"cons onto a value of type {tt}")
        case Hd(arg=a):
            return _as_list_elem(gamma, type_of(gamma, a))
        case Tl(arg=a):
            return ListT(_as_list_elem(gamma, type_of(gamma, a)))
        case IsNil(arg=a):
            _as_list_elem(gamma, type_of(gamma, a))
            return BoolT()
        case Fix(name=f, ty=ty, body=b):
            if ty is None:
                raise ValueError("fix missing its annotation (unelaborated term)")
            kind_check(gamma, ty)
            f2, (b2,) = _fresh_decl_name(gamma, f, [b])
            tb = type_of(insert(gamma, TermDecl(f2, EMPTY, 0, ty)), b2)
            if not type_eq(gamma, tb, ty):
                _err(TYPE_MISMATCH, f"fix body has type {tb}, annotation says {ty}")
            return ty
        case _:
            raise TypeError(f"type_of: unexpected {e!r}")


def _as_list_elem(gamma: Context, t: Type) -> Type:
    t = force(gamma, t)
    match t:
        case ListT(elem=s):
            return s
        case _ if gamma.contradiction:
            return IntT()
        case _:
            _err(TYPE_MISMATCH, f"expected a list, got {t}")


def _dead_local(hat) -> Context:
    """A placeholder local context for eliminations under contradiction."""
    out = []
    for v in hat:
        if v.is_type:
            out.append(TypeDecl(v.name, EMPTY, v.level))
        else:
            out.append(TermDecl(v.name, EMPTY, v.level, IntT()))
    return Context(tuple(out))


def _match_hat_names(hat, loc: Context, type_vars_only=False):
    """Validate a binder hat against a local context and rename the
    context to the hat's names."""
    if len(hat) != len(loc.entries):
        _err(
            ARITY_MISMATCH,
            f"binder lists {len(hat)} variables, context has {len(loc.entries)}",
        )
    for v, d in zip(hat, loc.entries):
        if v.level != d.level:
            _err(
                LEVEL_VIOLATION,
                f"binder {v.name!r} at level {v.level}, declaration at {d.level}",
            )
        if v.is_type != (not isinstance(d, TermDecl)):
            _err(KIND_MISMATCH, f"binder {v.name!r} has the wrong sort")
        if type_vars_only and isinstance(d, TermDecl):
            _err(KIND_MISMATCH, "kind context must declare only type variables")
    mapping = {
        d.name: v.name for v, d in zip(hat, loc.entries) if d.name != v.name
    }
    return rename_context(loc, mapping) if mapping else loc


def _type_of_case(gamma: Context, e: Case) -> Type:
    from .patterns import pat_type_check
    from .unification import unify_contextual_type

    annot = e.annot
    if not isinstance(annot, BoxT):
        raise ValueError("case annotation must be a contextual type")
    kind_check(gamma, annot)
    k = annot.level
    ts = type_of(gamma, e.scrut)
    if not type_eq(gamma, ts, annot):
        _err(TYPE_MISMATCH, f"scrutinee has type {ts}, annotation says {annot}")
    if not e.branches:
        _err(TYPE_MISMATCH, "cannot synthesize a type for an empty case")

    candidates = []
    branch_envs = []
    for br in e.branches:
        if br.annot_level != k:
            _err(
                LEVEL_VIOLATION,
                f"branch annotated at level {br.annot_level}, scrutinee at {k}",
            )
        if tuple(v.name for v in br.local_hat) != tuple(
            d.name for d in br.annot_ctx.entries
        ):
            _err(
                CONTEXT_MALFORMED,
                "branch pattern binder does not erase its annotation context",
            )
        pv, ac, pattern, annot_ty, body = _freshen_branch(gamma, br)
        # pattern variables slot in right of equal-level ambient entries,
        # so their locals may mention ambient variables and the flexible
        # side of a tie is the pattern's
        try:
            gm = merge(chop_lower(gamma, k), pv)
            wf_context(append(gm, ac))
        except ValueError as exc:
            _err(CONTEXT_MALFORMED, str(exc))
        pat_type_check(pv, ac, k, pattern, annot_ty)
        gi = unify_contextual_type(gm, (annot.local, k, annot.body), (ac, k, annot_ty))
        genv = append(gi, chop_upper(gamma, k))
        si = zonk(genv, type_of(genv, body))
        candidates.append(si)
        branch_envs.append(genv)
    for cand in candidates:
        try:
            kind_check(gamma, cand)
        except TypeCheckError:
            continue
        if all(
            type_eq(env, cand, si) for env, si in zip(branch_envs, candidates)
        ):
            return cand
    _err(TYPE_MISMATCH, "no branch result type is consistent across all branches")


def _freshen_branch(gamma: Context, br):
    """Rename a branch's pattern variables and bound variables away from
    the ambient context's names."""
    pv, ac = br.pat_vars, br.annot_ctx
    pattern, annot_ty, body = br.pattern, br.annot_type, br.body
    taken = set(gamma.names())
    # pattern variable names
    clash = [d.name for d in pv.entries if d.name in taken]
    if clash:
        avoid = taken | pv.names() | free_names(pattern) | free_names(body)
        m = {}
        for n in clash:
            new = fresh_name(n, avoid)
            avoid.add(new)
            m[n] = new
        pv = rename_context(pv, m)
        pattern = rename(pattern, m)
        body = rename(body, m)
    taken |= pv.names()
    # bound variable names (the annotation context)
    clash = [d.name for d in ac.entries if d.name in taken]
    if clash:
        avoid = taken | ac.names() | free_names(pattern) | free_names(annot_ty)
        m = {}
        for n in clash:
            new = fresh_name(n, avoid)
            avoid.add(new)
            m[n] = new
        ac = rename_context(ac, m)
        pattern = rename(pattern, m)
        annot_ty = rename(annot_ty, m)
        pv = rename_free_in_context(pv, m)
    return pv, ac, pattern, annot_ty, body


# ---------------------------------------------------------------------------
# substitution typing


def subst_check(gamma: Context, sigma: tuple, phi: Context) -> None:
    """gamma |- sigma : phi."""
    if phi.contradiction:
        if not gamma.contradiction:
            _err(
                CONTEXT_MALFORMED,
                "substitution into a contradictory domain needs # in the context",
            )
        phi = Context(phi.entries)
    if len(sigma) != len(phi.entries):
        _err(
            ARITY_MISMATCH,
            f"substitution has {len(sigma)} entries, domain declares {len(phi.entries)}",
        )
    if not phi.entries:
        return
    prefix = Context(phi.entries[:-1])
    subst_check(gamma, sigma[:-1], prefix)
    _entry_check(gamma, sigma[:-1], prefix, sigma[-1], phi.entries[-1])


def _entry_check(gamma, sig_prefix, prefix: Context, ent, d) -> None:
    n = d.level
    phat = hat_of(prefix)
    s2, d2 = chop_lower_subst(sig_prefix, phat, n)
    loc_sub = apply_context(s2, d2, d.local)

    def expected_type(t: Type) -> Type:
        ext_s, ext_d = append_subst(s2, d2, id_subst(hat_of(d.local)), hat_of(d.local))
        return apply_type(ext_s, ext_d, t)

    match ent, d:
        case (CTerm(ctx_hat=hat, level=k, term=body), TermDecl(type=t)):
            if k != n:
                _err(LEVEL_VIOLATION, f"entry for {d.name!r}: level {k} != {n}")
            loc2 = _match_hat_names(hat, loc_sub)
            loc3, (body2,) = _fresh_local_vs(gamma, loc2, [body])
            scope = _scoped(gamma, n, loc3)
            te = type_of(scope, body2)
            want = expected_type(t)
            want = rename(
                want,
                dict(
                    zip(
                        (x.name for x in d.local.entries),
                        (x.name for x in loc3.entries),
                    )
                ),
            )
            if not type_eq(scope, te, want):
                _err(
                    TYPE_MISMATCH,
                    f"entry for {d.name!r} has type {te}, expected {want}",
                )
        case (RenameTerm(name=y, level=k), TermDecl(type=t)):
            if k != n:
                _err(LEVEL_VIOLATION, f"rename for {d.name!r}: level {k} != {n}")
            dy = lookup_decl(gamma, y)
            if dy is None:
                _err(UNBOUND, f"rename target {y!r} is not declared")
            if not isinstance(dy, TermDecl):
                _err(KIND_MISMATCH, f"rename target {y!r} is not a term variable")
            if dy.level != n:
                _err(
                    LEVEL_VIOLATION,
                    f"rename target {y!r} at level {dy.level}, needs {n}",
                )
            if not context_eq(gamma, dy.local, loc_sub):
                _err(
                    TYPE_MISMATCH,
                    f"rename target {y!r} has a different local context",
                )
            want = expected_type(t)
            want = rename(
                want,
                dict(
                    zip(
                        (x.name for x in d.local.entries),
                        (x.name for x in dy.local.entries),
                    )
                ),
            )
            scope = _scoped(gamma, n, dy.local)
            if not type_eq(scope, dy.type, want):
                _err(
                    TYPE_MISMATCH,
                    f"rename target {y!r} has type {dy.type}, expected {want}",
                )
        case (CType(ctx_hat=hat, level=k, type=ty), TypeDecl()):
            if k != n:
                _err(LEVEL_VIOLATION, f"entry for '{d.name}: level {k} != {n}")
            loc2 = _match_hat_names(hat, loc_sub)
            loc3, (ty2,) = _fresh_local_vs(gamma, loc2, [ty])
            kind_check(_scoped(gamma, n, loc3), ty2)
        case (RenameType(name=b, level=k), TypeDecl()):
            if k != n:
                _err(LEVEL_VIOLATION, f"rename for '{d.name}: level {k} != {n}")
            db = lookup_decl(gamma, b)
            if db is None:
                _err(UNBOUND, f"rename target '{b} is not declared")
            if isinstance(db, TermDecl):
                _err(KIND_MISMATCH, f"rename target '{b} is not a type variable")
            if db.level != n:
                _err(
                    LEVEL_VIOLATION,
                    f"rename target '{b} at level {db.level}, needs {n}",
                )
            if not context_eq(gamma, db.local, loc_sub):
                _err(TYPE_MISMATCH, f"rename target '{b} has a different local context")
        case ((CType() | RenameType()) as entc, TypeConstraint(solution_hat=shat, solution=sol)):
            k = entc.level
            if k != n:
                _err(LEVEL_VIOLATION, f"entry for '{d.name}: level {k} != {n}")
            if isinstance(entc, RenameType):
                db = lookup_decl(gamma, entc.name)
                if db is None or isinstance(db, TermDecl):
                    _err(UNBOUND, f"rename target '{entc.name} is unusable")
                ty = TVar(entc.name, id_subst(hat_of(db.local)))
                loc3 = loc_sub
            else:
                ty = entc.type
                loc3 = _match_hat_names(entc.ctx_hat, loc_sub)
            scope = _scoped(gamma, n, loc3)
            kind_check(scope, ty)
            ext_s, ext_d = append_subst(s2, d2, id_subst(shat), shat)
            want = apply_type(ext_s, ext_d, sol)
            want = rename(
                want,
                dict(
                    zip(
                        (v.name for v in shat),
                        (x.name for x in loc3.entries),
                    )
                ),
            )
            if not type_eq(scope, ty, want):
                _err(
                    TYPE_MISMATCH,
                    f"constrained entry for '{d.name}: {ty} is not {want}",
                )
        case _:
            _err(
                KIND_MISMATCH,
                f"substitution entry {ent} does not fit declaration {d}",
            )


# ---------------------------------------------------------------------------
# equality modulo constraints


def _solution(psi: Context, t: Type):
    """The entry if t is a solved variable occurrence, else None."""
    if not constraint_lookup_enabled:
        return None
    if isinstance(t, TVar):
        d = lookup_decl(psi, t.name)
        if isinstance(d, TypeConstraint):
            return d
    return None


def type_eq(psi: Context, t: Type, s: Type) -> bool:
    if psi.contradiction:
        return True
    dt = _solution(psi, t)
    if dt is not None:
        return type_eq(psi, apply_type(t.subst, dt.solution_hat, dt.solution), s)
    ds = _solution(psi, s)
    if ds is not None:
        return type_eq(psi, t, apply_type(s.subst, ds.solution_hat, ds.solution))
    match t, s:
        case TVar(name=a, subst=s1), TVar(name=b, subst=s2):
            if a != b:
                return False
            d = lookup_decl(psi, a)
            if d is None or isinstance(d, TermDecl):
                return alpha_eq(t, s)
            return subst_eq(psi, s1, s2, d.local)
        case Arrow(dom=a1, cod=b1), Arrow(dom=a2, cod=b2):
            return type_eq(psi, a1, a2) and type_eq(psi, b1, b2)
        case Forall(name=a1, local=l1, level=n1, body=b1), Forall(
            name=a2, local=l2, level=n2, body=b2
        ):
            if n1 != n2 or not context_eq(chop_lower(psi, n1), l1, l2):
                return False
            a3, (b1b,) = _fresh_decl_name(psi, a1, [b1])
            return type_eq(
                insert(psi, TypeDecl(a3, l1, n1)), b1b, rename(b2, {a2: a3})
            )
        case BoxT(local=l1, level=n1, body=b1), BoxT(local=l2, level=n2, body=b2):
            if n1 != n2 or not context_eq(chop_lower(psi, n1), l1, l2):
                return False
            l1b, (b1b,) = _fresh_local_vs(psi, l1, [b1])
            m = dict(
                zip((d.name for d in l2.entries), (d.name for d in l1b.entries))
            )
            return type_eq(_scoped(psi, n1, l1b), b1b, rename(b2, m))
        case (IntT(), IntT()) | (BoolT(), BoolT()):
            return True
        case ListT(elem=e1), ListT(elem=e2):
            return type_eq(psi, e1, e2)
        case _:
            return False


def context_eq(psi: Context, c1: Context, c2: Context) -> bool:
    if psi.contradiction:
        return True
    if c1.contradiction != c2.contradiction or len(c1) != len(c2):
        return False
    m: dict = {}
    prefix: list = []
    for d1, d2 in zip(c1.entries, c2.entries):
        if d1.level != d2.level or type(d1) is not type(d2):
            return False
        n = d1.level
        amb = merge(chop_lower(psi, n), Context(tuple(prefix)))
        loc2 = rename_free_in_context(d2.local, m)
        if not context_eq(amb, d1.local, loc2):
            return False
        local_map = dict(
            zip((x.name for x in d2.local.entries), (x.name for x in d1.local.entries))
        )
        if isinstance(d1, TermDecl):
            t2 = rename(d2.type, {**m, **local_map})
            scope = merge(amb, d1.local) if d1.local.entries else amb
            if not type_eq(scope, d1.type, t2):
                return False
        elif isinstance(d1, TypeConstraint):
            s2 = rename(d2.solution, {**m, **local_map})
            scope = merge(amb, d1.local) if d1.local.entries else amb
            if not type_eq(scope, d1.solution, s2):
                return False
        if d2.name != d1.name:
            m[d2.name] = d1.name
        prefix.append(d1)
    return True


def subst_eq(psi: Context, s1: tuple, s2: tuple, phi: Context) -> bool:
    """Structural equality of two substitutions at domain phi."""
    if psi.contradiction:
        return True
    entries = phi.entries
    if len(s1) != len(s2) or len(s1) != len(entries):
        return False
    phat = hat_of(phi)
    for i, (e1, e2, d) in enumerate(zip(s1, s2, entries)):
        k = d.level
        sp, dp = chop_lower_subst(s1[:i], phat[:i], k)
        loc_sub = apply_context(sp, dp, d.local)
        if isinstance(d, TermDecl):
            if not _term_entry_eq(e1, e2):
                return False
        else:
            if not _type_entry_eq(psi, e1, e2, k, loc_sub):
                return False
    return True


def _as_code(ent):
    """View a term entry uniformly as (hat, body)."""
    match ent:
        case CTerm(ctx_hat=h, term=b):
            return h, b
        case RenameTerm(name=y):
            return None, y
    return None, None


def _term_entry_eq(e1, e2) -> bool:
    match e1, e2:
        case RenameTerm(name=y1, level=k1), RenameTerm(name=y2, level=k2):
            return y1 == y2 and k1 == k2
        case RenameTerm(name=y), CTerm(ctx_hat=h, term=b):
            return alpha_eq(Var(y, id_subst(h)), b)
        case CTerm(ctx_hat=h, term=b), RenameTerm(name=y):
            return alpha_eq(b, Var(y, id_subst(h)))
        case CTerm(ctx_hat=h1, level=k1, term=b1), CTerm(ctx_hat=h2, level=k2, term=b2):
            if k1 != k2 or len(h1) != len(h2):
                return False
            m = {v2.name: v1.name for v1, v2 in zip(h1, h2) if v1.name != v2.name}
            return alpha_eq(b1, rename(b2, m))
        case _:
            return False


def _type_entry_eq(psi: Context, e1, e2, k: int, loc_sub: Context) -> bool:
    def as_type(ent):
        match ent:
            case RenameType(name=b):
                return TVar(b, id_subst(hat_of(loc_sub)))
            case CType(ctx_hat=h, type=ty):
                m = dict(
                    zip((v.name for v in h), (x.name for x in loc_sub.entries))
                )
                return rename(ty, m)
        return None

    t1, t2 = as_type(e1), as_type(e2)
    if t1 is None or t2 is None:
        return False
    if isinstance(e1, RenameType) and isinstance(e2, RenameType) and e1 == e2:
        return True
    try:
        scope = merge(chop_lower(psi, k), loc_sub)
    except ValueError:
        scope = chop_lower(psi, k)
    return type_eq(scope, t1, t2)
