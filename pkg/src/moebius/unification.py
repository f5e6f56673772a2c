"""First-order unification of types under a constraint context.

`unify_type(gamma, phi, t, s)` refines `gamma` so that `t` and `s`
become equal, or marks it contradictory; it never fails.  `gamma`
holds the refinable variables (unsolved type declarations whose
occurrences carry identity closures are flexible), `phi` the rigid
local variables bound by the surrounding type structure.

Solving a variable records a constraint entry in place of its
declaration; the solution must survive a kind check against the
prefix that precedes the variable, so solutions can never smuggle in
later declarations or escaped local variables.  Any failure of that
discipline, an occurs-cycle, or a structural clash degrades to the
contradiction marker rather than an exception.

The result context always refines the input: same declarations in the
same order, where some type declarations may have gained solutions
and the contradiction marker may have appeared.
"""

from __future__ import annotations

from .contexts import (
    append,
    chop_lower,
    id_subst,
    insert,
    lookup_decl,
    merge,
)
from .substitution import apply_type
from .syntax import (
    Arrow,
    BoolT,
    BoxT,
    Context,
    CTerm,
    CType,
    EMPTY,
    Forall,
    free_names,
    fresh_name,
    hat_of,
    IntT,
    ListT,
    rename,
    rename_context,
    rename_free_in_context,
    RenameTerm,
    RenameType,
    TermDecl,
    TVar,
    Type,
    TypeConstraint,
    TypeDecl,
)
from .typecheck import TypeCheckError, kind_check, _term_entry_eq


def occurs(gamma: Context, name: str, t) -> bool:
    """Does `name` occur in `t`, looking through recorded solutions?"""
    seen: set = set()
    work = [t]
    while work:
        x = work.pop()
        for nm in free_names(x):
            if nm == name:
                return True
            if nm in seen:
                continue
            seen.add(nm)
            d = lookup_decl(gamma, nm)
            if isinstance(d, TypeConstraint):
                work.append(d.solution)
    return False


def _unfold(gamma: Context, phi: Context, t: Type) -> Type:
    while (
        isinstance(t, TVar)
        and t.name not in phi.names()
        and isinstance(d := lookup_decl(gamma, t.name), TypeConstraint)
    ):
        t = apply_type(t.subst, d.solution_hat, d.solution)
    return t


def _flex(gamma: Context, phi: Context, t: Type):
    """The declaration if t is a solvable variable occurrence."""
    if not isinstance(t, TVar) or t.name in phi.names():
        return None
    d = lookup_decl(gamma, t.name)
    if isinstance(d, TypeDecl) and t.subst == id_subst(hat_of(d.local)):
        return d
    return None


def _index(gamma: Context, name: str) -> int:
    for i, d in enumerate(gamma.entries):
        if d.name == name:
            return i
    raise KeyError(name)


def _solve(gamma: Context, name: str, sol: Type) -> Context:
    """Record name := sol, or mark the contradiction."""
    if occurs(gamma, name, sol):
        return gamma.with_contradiction()
    i = _index(gamma, name)
    d = gamma.entries[i]
    try:
        scope = append(Context(gamma.entries[:i], gamma.contradiction), d.local)
        kind_check(scope, sol)
    except (TypeCheckError, ValueError):
        return gamma.with_contradiction()
    entry = TypeConstraint(d.name, d.local, d.level, hat_of(d.local), sol)
    return Context(
        gamma.entries[:i] + (entry,) + gamma.entries[i + 1 :],
        gamma.contradiction,
    )


def unify_type(gamma: Context, phi: Context, t: Type, s: Type) -> Context:
    if gamma.contradiction:
        return gamma
    t = _unfold(gamma, phi, t)
    s = _unfold(gamma, phi, s)
    match t, s:
        case TVar(name=a, subst=s1), TVar(name=b, subst=s2) if a == b:
            if s1 == s2:
                return gamma
            d = lookup_decl(phi, a) or lookup_decl(gamma, a)
            if d is None or isinstance(d, TermDecl):
                return gamma.with_contradiction()
            return unify_subst(gamma, phi, s1, s2, d.local)
        case _:
            pass
    ft = _flex(gamma, phi, t)
    fs = _flex(gamma, phi, s)
    if ft is not None and fs is not None:
        ia, ib = _index(gamma, ft.name), _index(gamma, fs.name)
        earlier, later = (ft, fs) if ia < ib else (fs, ft)
        if len(earlier.local) != len(later.local):
            return gamma.with_contradiction()
        closure = tuple(
            RenameType(d.name, d.level)
            if not isinstance(d, TermDecl)
            else RenameTerm(d.name, d.level)
            for d in later.local.entries
        )
        return _solve(gamma, later.name, TVar(earlier.name, closure))
    if ft is not None:
        return _solve(gamma, ft.name, s)
    if fs is not None:
        return _solve(gamma, fs.name, t)
    match t, s:
        case Arrow(dom=a1, cod=b1), Arrow(dom=a2, cod=b2):
            g = unify_type(gamma, phi, a1, a2)
            return unify_type(g, phi, b1, b2)
        case BoxT(local=l1, level=n1, body=b1), BoxT(local=l2, level=n2, body=b2):
            if n1 != n2:
                return gamma.with_contradiction()
            g, rmap = unify_context(gamma, chop_lower(phi, n1), l1, l2)
            if g.contradiction:
                return g
            try:
                inner = append(chop_lower(phi, n1), l1)
            except ValueError:
                return g.with_contradiction()
            return unify_type(g, inner, b1, rename(b2, rmap))
        case Forall(name=a1, local=l1, level=n1, body=b1), Forall(
            name=a2, local=l2, level=n2, body=b2
        ):
            if n1 != n2:
                return gamma.with_contradiction()
            g, rmap = unify_context(gamma, chop_lower(phi, n1), l1, l2)
            if g.contradiction:
                return g
            a3 = a1
            if a1 in phi.names() or a1 in gamma.names():
                taken = (
                    gamma.names() | phi.names() | free_names(b1) | free_names(b2)
                )
                a3 = fresh_name(a1, taken)
                b1 = rename(b1, {a1: a3})
            try:
                inner = insert(phi, TypeDecl(a3, l1, n1))
            except ValueError:
                return g.with_contradiction()
            return unify_type(g, inner, b1, rename(b2, {**rmap, a2: a3}))
        case (IntT(), IntT()) | (BoolT(), BoolT()):
            return gamma
        case ListT(elem=e1), ListT(elem=e2):
            return unify_type(gamma, phi, e1, e2)
        case _:
            return gamma.with_contradiction()


def unify_context(gamma: Context, phi: Context, c1: Context, c2: Context):
    """Pointwise unification; returns (gamma', names of c2 -> names of c1)."""
    rmap: dict = {}
    if gamma.contradiction:
        return gamma, rmap
    if len(c1) != len(c2) or c1.contradiction != c2.contradiction:
        return gamma.with_contradiction(), rmap
    g = gamma
    prefix: list = []
    for d1, d2 in zip(c1.entries, c2.entries):
        if d1.level != d2.level or type(d1) is not type(d2):
            return g.with_contradiction(), rmap
        if isinstance(d1, TypeConstraint):
            return g.with_contradiction(), rmap
        n = d1.level
        try:
            amb = merge(chop_lower(phi, n), Context(tuple(prefix)))
        except ValueError:
            return g.with_contradiction(), rmap
        d2loc = rename_free_in_context(d2.local, rmap)
        g, inner = unify_context(g, amb, d1.local, d2loc)
        if g.contradiction:
            return g, rmap
        if isinstance(d1, TermDecl):
            localmap = dict(
                zip(
                    (e.name for e in d2.local.entries),
                    (e.name for e in d1.local.entries),
                )
            )
            try:
                scope = append(amb, d1.local)
            except ValueError:
                return g.with_contradiction(), rmap
            g = unify_type(g, scope, d1.type, rename(d2.type, {**rmap, **localmap}))
            if g.contradiction:
                return g, rmap
        if d2.name != d1.name:
            rmap[d2.name] = d1.name
        prefix.append(d1)
    return g, rmap


def unify_subst(
    gamma: Context, phi: Context, s1: tuple, s2: tuple, dom: Context
) -> Context:
    """Pointwise unification of two closures at the same domain."""
    if gamma.contradiction:
        return gamma
    if len(s1) != len(s2) or len(s1) != len(dom.entries):
        return gamma.with_contradiction()
    g = gamma
    for e1, e2, d in zip(s1, s2, dom.entries):
        k = d.level
        match e1, e2:
            case (RenameTerm(name=y1), RenameTerm(name=y2)) if isinstance(
                d, TermDecl
            ):
                if y1 != y2:
                    return g.with_contradiction()
            case (
                (RenameType() | CType()),
                (RenameType() | CType()),
            ) if not isinstance(d, TermDecl):
                hat = hat_of(d.local)
                dloc = d.local
                if isinstance(e1, CType):
                    pairing = dict(
                        zip((v.name for v in hat), (v.name for v in e1.ctx_hat))
                    )
                    dloc = rename_context(d.local, pairing)
                    hat = hat_of(dloc)

                def view(e):
                    match e:
                        case RenameType(name=b):
                            return TVar(b, id_subst(hat))
                        case CType(ctx_hat=h, type=ty):
                            m = dict(
                                zip(
                                    (v.name for v in h),
                                    (v.name for v in hat),
                                )
                            )
                            return rename(ty, m)

                try:
                    scope = append(chop_lower(phi, k), dloc)
                except ValueError:
                    return g.with_contradiction()
                g = unify_type(g, scope, view(e1), view(e2))
                if g.contradiction:
                    return g
            case _ if isinstance(d, TermDecl):
                if not _term_entry_eq(e1, e2):
                    return g.with_contradiction()
            case _:
                return g.with_contradiction()
    return g


def unify_contextual_type(gamma: Context, ct1, ct2) -> Context:
    """Unify (local |-^k body) pairs; the left is the scrutinee side."""
    l1, k1, t1 = ct1
    l2, k2, t2 = ct2
    if k1 != k2:
        return gamma.with_contradiction()
    g, rmap = unify_context(gamma, EMPTY, l1, l2)
    if g.contradiction:
        return g
    return unify_type(g, l1, t1, rename(t2, rmap))


def refines(g2: Context, g1: Context) -> bool:
    """Is g2 the input g1 with some declarations solved (and possibly
    the contradiction marker added)?"""
    if len(g2) != len(g1):
        return False
    if g1.contradiction and not g2.contradiction:
        return False
    for d2, d1 in zip(g2.entries, g1.entries):
        if d2 == d1:
            continue
        if (
            isinstance(d1, TypeDecl)
            and isinstance(d2, TypeConstraint)
            and d2.name == d1.name
            and d2.level == d1.level
            and d2.local == d1.local
        ):
            continue
        return False
    return True
