"""Simultaneous contextual substitution.

A substitution sigma is a tuple of entries paired positionally with an
erased domain context: contextual terms/types (hat.^n payload) and
renames.  Applying [sigma/dom] to syntax walks the tree; at a binder of
level n the substitution is extended with an identity rename when
n < level(dom), and at a box of level n it is chopped to the entries at
level >= n and extended with the identity of the box's local context.
Entries whose level sits at or above level(dom) pass through untouched:
such code cannot mention any of dom's variables.

All clauses are capture-avoiding: binders that clash with the names the
substitution could introduce are freshened first.
"""

from __future__ import annotations

from .contexts import id_subst, insert, lookup_decl
from .syntax import (
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
    ErasedContext,
    Fix,
    Forall,
    free_names,
    fresh_name,
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
    RenameTerm,
    RenameType,
    rename,
    rename_context,
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
    erase,
    hat_of,
    level_of,
)

# counts apply_type/apply_term entries; the metatheory suite uses it as
# a fuel meter for the termination property
op_counter = [0]


def lookup_subst(sigma: tuple, dom: ErasedContext, name: str):
    """Entry paired with the domain variable `name`, or None.

    The pairing is positional from the right; under the unique-name
    discipline a name-keyed scan is equivalent.
    """
    if len(sigma) != len(dom):
        raise ValueError(
            f"substitution length {len(sigma)} != domain length {len(dom)}"
        )
    for ent, v in zip(reversed(sigma), reversed(dom)):
        if v.name == name:
            if v.is_type:
                assert isinstance(ent, (CType, RenameType)), ent
            else:
                assert isinstance(ent, (CTerm, RenameTerm)), ent
            return ent
    return None


def chop_lower_subst(sigma: tuple, dom: ErasedContext, n: int):
    """Keep the entry/domain pairs at level >= n."""
    pairs = [(e, v) for e, v in zip(sigma, dom) if v.level >= n]
    return tuple(e for e, _ in pairs), tuple(v for _, v in pairs)


def append_subst(sigma: tuple, dom: ErasedContext, rho: tuple, rho_dom: ErasedContext):
    """Concatenate substitutions pointwise with their domains.  The
    result's domain must still be level-sorted."""
    out_dom = dom + rho_dom
    prev = None
    for v in out_dom:
        if prev is not None and v.level > prev:
            raise ValueError("appended substitution domain not level-sorted")
        prev = v.level
    return sigma + rho, out_dom


def insert_subst(sigma: tuple, dom: ErasedContext, entry, var: HatVar):
    """Insert an entry/domain pair at its sorted position (rightmost
    among equal levels), mirroring context insert."""
    i = len(dom)
    while i > 0 and dom[i - 1].level < var.level:
        i -= 1
    return sigma[:i] + (entry,) + sigma[i:], dom[:i] + (var,) + dom[i:]


def _range_names(sigma: tuple) -> frozenset:
    acc: set = set()
    for ent in sigma:
        match ent:
            case RenameTerm(name=n) | RenameType(name=n):
                acc.add(n)
            case CTerm(ctx_hat=hat, term=e):
                acc |= free_names(e) - {v.name for v in hat}
            case CType(ctx_hat=hat, type=t):
                acc |= free_names(t) - {v.name for v in hat}
    return frozenset(acc)


def _freshen_binder(name: str, body, sigma: tuple, dom: ErasedContext):
    """Rename one binder out of the way of sigma's range and domain."""
    avoid = _range_names(sigma) | {v.name for v in dom}
    if name not in avoid:
        return name, body
    new = fresh_name(name, avoid | free_names(body))
    return new, rename(body, {name: new})


def _freshen_hat(hat: ErasedContext, bodies, sigma: tuple, dom: ErasedContext):
    """Rename a binder hat out of the way of sigma; bodies is a list of
    nodes the hat scopes over."""
    avoid = _range_names(sigma) | {v.name for v in dom}
    clashing = [v.name for v in hat if v.name in avoid]
    if not clashing:
        return hat, bodies
    taken = set(avoid) | {v.name for v in hat}
    for b in bodies:
        taken |= free_names(b)
    mapping = {}
    for n in clashing:
        new = fresh_name(n, taken)
        taken.add(new)
        mapping[n] = new
    hat2 = tuple(
        HatVar(mapping.get(v.name, v.name), v.level, v.is_type) for v in hat
    )
    return hat2, [rename(b, mapping) for b in bodies]


def _freshen_local(local: Context, bodies, sigma: tuple, dom: ErasedContext):
    """Rename a local context's declared names away from sigma's range.

    Returns (local', bodies', hat') where hat' erases local'.
    """
    avoid = _range_names(sigma) | {v.name for v in dom}
    clashing = [d.name for d in local.entries if d.name in avoid]
    if not clashing:
        return local, list(bodies), erase(local)
    taken = set(avoid) | local.names()
    for b in bodies:
        taken |= free_names(b)
    mapping = {}
    for n in clashing:
        new = fresh_name(n, taken)
        taken.add(new)
        mapping[n] = new
    local2 = rename_context(local, mapping)
    return local2, [rename(b, mapping) for b in bodies], erase(local2)


def _extend_id(sigma: tuple, dom: ErasedContext, hat: ErasedContext):
    """sigma ++ id(hat) with the matching domain extension."""
    return append_subst(sigma, dom, id_subst(hat), hat)


# ---------------------------------------------------------------------------
# types


def apply_type(sigma: tuple, dom: ErasedContext, t: Type) -> Type:
    op_counter[0] += 1
    lvl = level_of(dom)
    match t:
        case TVar(name=a, subst=s):
            ent = lookup_subst(sigma, dom, a)
            s2 = apply_subst(sigma, dom, s)
            match ent:
                case None:
                    return TVar(a, s2)
                case CType(ctx_hat=hat, level=n, type=sol):
                    assert lvl > n
                    return apply_type(s2, hat, sol)
                case RenameType(name=b):
                    return TVar(b, s2)
                case _:
                    raise ValueError(f"term entry for type variable {a!r}")
        case Arrow(dom=d, cod=c):
            return Arrow(apply_type(sigma, dom, d), apply_type(sigma, dom, c))
        case Forall(name=a, local=loc, level=n, body=b):
            # pure type locals carry no type occurrences: nothing to do there
            a2, b2 = _freshen_binder(a, b, sigma, dom)
            if lvl > n:
                s2, d2 = insert_subst(
                    sigma, dom, RenameType(a2, n), HatVar(a2, n, True)
                )
                return Forall(a2, loc, n, apply_type(s2, d2, b2))
            return Forall(a2, loc, n, apply_type(sigma, dom, b2))
        case BoxT(local=loc, level=n, body=b):
            if lvl < n:
                return t
            s1, d1 = chop_lower_subst(sigma, dom, n)
            loc2, (b2,), hat = _freshen_local(loc, [b], s1, d1)
            loc3 = apply_context(s1, d1, loc2)
            s2, d2 = _extend_id(s1, d1, hat)
            return BoxT(loc3, n, apply_type(s2, d2, b2))
        case IntT() | BoolT():
            return t
        case ListT(elem=e):
            return ListT(apply_type(sigma, dom, e))
        case _:
            raise TypeError(f"apply_type: unexpected {t!r}")


# ---------------------------------------------------------------------------
# terms


def apply_term(sigma: tuple, dom: ErasedContext, e: Term) -> Term:
    op_counter[0] += 1
    lvl = level_of(dom)
    match e:
        case Var(name=x, subst=s):
            ent = lookup_subst(sigma, dom, x)
            s2 = apply_subst(sigma, dom, s)
            match ent:
                case None:
                    return Var(x, s2)
                case CTerm(ctx_hat=hat, level=n, term=body):
                    assert lvl > n
                    return apply_term(s2, hat, body)
                case RenameTerm(name=y):
                    return Var(y, s2)
                case _:
                    raise ValueError(f"type entry for term variable {x!r}")
        case Lam(name=x, ty=ty, body=b):
            ty2 = apply_type(sigma, dom, ty) if ty is not None else None
            x2, b2 = _freshen_binder(x, b, sigma, dom)
            if lvl > 0:
                s2, d2 = insert_subst(
                    sigma, dom, RenameTerm(x2, 0), HatVar(x2, 0, False)
                )
                return Lam(x2, ty2, apply_term(s2, d2, b2))
            return Lam(x2, ty2, apply_term(sigma, dom, b2))
        case Fix(name=f, ty=ty, body=b):
            ty2 = apply_type(sigma, dom, ty) if ty is not None else None
            f2, b2 = _freshen_binder(f, b, sigma, dom)
            if lvl > 0:
                s2, d2 = insert_subst(
                    sigma, dom, RenameTerm(f2, 0), HatVar(f2, 0, False)
                )
                return Fix(f2, ty2, apply_term(s2, d2, b2))
            return Fix(f2, ty2, apply_term(sigma, dom, b2))
        case App(fn=f, arg=a):
            return App(apply_term(sigma, dom, f), apply_term(sigma, dom, a))
        case TLam(name=a, level=n, body=b, local=loc):
            a2, b2 = _freshen_binder(a, b, sigma, dom)
            if lvl > n:
                s2, d2 = insert_subst(
                    sigma, dom, RenameType(a2, n), HatVar(a2, n, True)
                )
                return TLam(a2, n, apply_term(s2, d2, b2), loc)
            return TLam(a2, n, apply_term(sigma, dom, b2), loc)
        case TApp(fn=f, ctx_hat=hat, level=n, arg=ty):
            f2 = apply_term(sigma, dom, f)
            if lvl < n:
                return TApp(f2, hat, n, ty)
            s1, d1 = chop_lower_subst(sigma, dom, n)
            hat2, (ty2,) = _freshen_hat(hat, [ty], s1, d1)
            s2, d2 = _extend_id(s1, d1, hat2)
            return TApp(f2, hat2, n, apply_type(s2, d2, ty2))
        case BoxE(ctx_hat=hat, level=n, body=b, local=loc):
            if lvl < n:
                return e
            s1, d1 = chop_lower_subst(sigma, dom, n)
            if loc is not None:
                loc2, (b2,), hat2 = _freshen_local(loc, [b], s1, d1)
                loc3 = apply_context(s1, d1, loc2)
            else:
                hat2, (b2,) = _freshen_hat(hat, [b], s1, d1)
                loc3 = None
            s2, d2 = _extend_id(s1, d1, hat2)
            return BoxE(hat2, n, apply_term(s2, d2, b2), loc3)
        case LetBox(ctx_hat=hat, level=n, name=u, bound=e1, body=e2):
            e1b = apply_term(sigma, dom, e1)
            u2, e2b = _freshen_binder(u, e2, sigma, dom)
            if lvl > n:
                s2, d2 = insert_subst(
                    sigma, dom, RenameTerm(u2, n), HatVar(u2, n, False)
                )
                return LetBox(hat, n, u2, e1b, apply_term(s2, d2, e2b))
            return LetBox(hat, n, u2, e1b, apply_term(sigma, dom, e2b))
        case Case(scrut=s0, annot=annot, branches=bs):
            s0b = apply_term(sigma, dom, s0)
            annot2 = apply_type(sigma, dom, annot)
            return Case(s0b, annot2, tuple(_apply_branch(sigma, dom, br) for br in bs))
        case IntLit() | BoolLit():
            return e
        case PrimOp(op=o, lhs=a, rhs=b):
            return PrimOp(o, apply_term(sigma, dom, a), apply_term(sigma, dom, b))
        case If(cond=c, then=t, els=f):
            return If(
                apply_term(sigma, dom, c),
                apply_term(sigma, dom, t),
                apply_term(sigma, dom, f),
            )
        case Nil(elem=t):
            return Nil(apply_type(sigma, dom, t) if t is not None else None)
        case Cons(head=h, tail=tl):
            return Cons(apply_term(sigma, dom, h), apply_term(sigma, dom, tl))
        case Hd(arg=a):
            return Hd(apply_term(sigma, dom, a))
        case Tl(arg=a):
            return Tl(apply_term(sigma, dom, a))
        case IsNil(arg=a):
            return IsNil(apply_term(sigma, dom, a))
        case _:
            raise TypeError(f"apply_term: unexpected {e!r}")


def _apply_branch(sigma: tuple, dom: ErasedContext, br: Branch) -> Branch:
    """Substitute into one case arm.

    Patterns mention only their own bound and pattern variables, so the
    pattern is untouched; the annotation behaves like a box at the
    branch level and the body sees sigma extended with identity renames
    for the pattern variables.
    """
    k = br.annot_level
    # freshen pattern variables against sigma's range
    pv, (pattern, body), _ = _freshen_local(
        br.pat_vars, [br.pattern, br.body], sigma, dom
    )
    pv2 = apply_context(sigma, dom, pv)
    # the annotation is a contextual type at level k
    s1, d1 = chop_lower_subst(sigma, dom, k)
    ac, (annot_ty, pattern), hat = _freshen_local(
        br.annot_ctx, [br.annot_type, pattern], s1, d1
    )
    ac2 = apply_context(s1, d1, ac)
    s2, d2 = _extend_id(s1, d1, hat)
    annot_ty2 = apply_type(s2, d2, annot_ty)
    # body: sigma extended with identity renames for the pattern vars
    sb, db = sigma, dom
    for d in pv2.entries:
        is_ty = not isinstance(d, TermDecl)
        ent = RenameType(d.name, d.level) if is_ty else RenameTerm(d.name, d.level)
        sb, db = insert_subst(sb, db, ent, HatVar(d.name, d.level, is_ty))
    body2 = apply_term(sb, db, body)
    return Branch(pv2, hat, pattern, ac2, k, annot_ty2, body2)


# ---------------------------------------------------------------------------
# substitution composition


def apply_subst(sigma: tuple, dom: ErasedContext, rho: tuple) -> tuple:
    """Compose: the result maps rho's domain through sigma."""
    out = []
    lvl = level_of(dom)
    for ent in rho:
        match ent:
            case RenameTerm(name=x, level=n):
                found = lookup_subst(sigma, dom, x)
                match found:
                    case None:
                        out.append(ent)
                    case CTerm() as c:
                        out.append(c)
                    case RenameTerm(name=y):
                        out.append(RenameTerm(y, n))
                    case _:
                        raise ValueError(f"type entry for term rename {x!r}")
            case RenameType(name=a, level=n):
                found = lookup_subst(sigma, dom, a)
                match found:
                    case None:
                        out.append(ent)
                    case CType() as c:
                        out.append(c)
                    case RenameType(name=b):
                        out.append(RenameType(b, n))
                    case _:
                        raise ValueError(f"term entry for type rename {a!r}")
            case CTerm(ctx_hat=hat, level=n, term=body):
                if lvl <= n:
                    out.append(ent)
                else:
                    s1, d1 = chop_lower_subst(sigma, dom, n)
                    hat2, (body2,) = _freshen_hat(hat, [body], s1, d1)
                    s2, d2 = _extend_id(s1, d1, hat2)
                    out.append(CTerm(hat2, n, apply_term(s2, d2, body2)))
            case CType(ctx_hat=hat, level=n, type=ty):
                if lvl <= n:
                    out.append(ent)
                else:
                    s1, d1 = chop_lower_subst(sigma, dom, n)
                    hat2, (ty2,) = _freshen_hat(hat, [ty], s1, d1)
                    s2, d2 = _extend_id(s1, d1, hat2)
                    out.append(CType(hat2, n, apply_type(s2, d2, ty2)))
            case _:
                raise TypeError(f"apply_subst: unexpected entry {ent!r}")
    return tuple(out)


# ---------------------------------------------------------------------------
# contexts


def apply_context(sigma: tuple, dom: ErasedContext, phi: Context) -> Context:
    """Substitute into a context entry-wise.

    Each entry at level n sees sigma extended with identity renames for
    the already-substituted prefix, chopped at n; an entry's type
    additionally sees the identity of its own local context.  The prefix
    extension uses sorted insertion because prefix declarations may sit
    above sigma's domain levels.
    """
    out = []
    prefix: list = []  # HatVars of the processed prefix
    for d in phi.entries:
        n = d.level
        s1, d1 = sigma, dom
        for v in prefix:
            ent = (
                RenameType(v.name, v.level)
                if v.is_type
                else RenameTerm(v.name, v.level)
            )
            s1, d1 = insert_subst(s1, d1, ent, v)
        s1, d1 = chop_lower_subst(s1, d1, n)
        local2 = apply_context(s1, d1, d.local)
        match d:
            case TermDecl(name=x, type=t):
                s2, d2 = _extend_id(s1, d1, hat_of(local2))
                out.append(TermDecl(x, local2, n, apply_type(s2, d2, t)))
                prefix.append(HatVar(x, n, False))
            case TypeDecl(name=a):
                out.append(TypeDecl(a, local2, n))
                prefix.append(HatVar(a, n, True))
            case TypeConstraint(name=a, solution_hat=hat, solution=sol):
                s2, d2 = _extend_id(s1, d1, hat)
                out.append(
                    TypeConstraint(a, local2, n, hat, apply_type(s2, d2, sol))
                )
                prefix.append(HatVar(a, n, True))
    return Context(tuple(out), phi.contradiction)


# ---------------------------------------------------------------------------
# single substitutions


def single_subst_type(hat: ErasedContext, level: int, sol: Type, alpha: str, target):
    """[(hat.^level sol) / alpha^level] target, for any syntax class."""
    sigma = (CType(hat, level, sol),)
    dom = (HatVar(alpha, level, True),)
    return _dispatch(sigma, dom, target)


def single_subst_term(hat: ErasedContext, level: int, sol: Term, x: str, target):
    """[(hat.^level sol) / x^level] target, for any syntax class."""
    sigma = (CTerm(hat, level, sol),)
    dom = (HatVar(x, level, False),)
    return _dispatch(sigma, dom, target)


def _dispatch(sigma, dom, target):
    if isinstance(target, Type):
        return apply_type(sigma, dom, target)
    if isinstance(target, Term):
        return apply_term(sigma, dom, target)
    if isinstance(target, Context):
        return apply_context(sigma, dom, target)
    if isinstance(target, tuple):
        return apply_subst(sigma, dom, target)
    raise TypeError(f"cannot substitute into {target!r}")
