"""Abstract syntax for the multi-level modal lambda-calculus.

Levels stratify variables: code at level n may mention local variables
below n and outer variables at n or above.  Contexts keep declarations
level-sorted, highest level leftmost; substitutions mirror their domain
contexts entry for entry.

Everything here is an immutable tree.  Binding is nominal; the
substitution module does capture-avoiding renaming with `rename` and
`fresh_name`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union


# ---------------------------------------------------------------------------
# erased contexts (name/level/sort skeletons used as binders and domains)


@dataclass(frozen=True)
class HatVar:
    name: str
    level: int
    is_type: bool = False

    def __str__(self) -> str:
        tick = "'" if self.is_type else ""
        return f"{tick}{self.name}^{self.level}"


ErasedContext = tuple  # tuple[HatVar, ...]


# ---------------------------------------------------------------------------
# types


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TVar(Type):
    """Type variable under a delayed substitution for its local context."""

    name: str
    subst: tuple = ()  # Subst

    def __str__(self) -> str:
        if not self.subst:
            return f"'{self.name}"
        return f"'{self.name}[{', '.join(map(str, self.subst))}]"


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type

    def __str__(self) -> str:
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True)
class Forall(Type):
    """(alpha : (local |-^level *)) -> body"""

    name: str
    local: "Context"
    level: int
    body: Type

    def __str__(self) -> str:
        return f"(('{self.name}:({self.local} |-^{self.level} *)) -> {self.body})"


@dataclass(frozen=True)
class BoxT(Type):
    """Contextual type [local |-^level body]; level > 0 during typing."""

    local: "Context"
    level: int
    body: Type

    def __str__(self) -> str:
        return f"[{self.local} |-^{self.level} {self.body}]"


@dataclass(frozen=True)
class IntT(Type):
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class BoolT(Type):
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class ListT(Type):
    elem: Type

    def __str__(self) -> str:
        return f"{self.elem} list"


# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    subst: tuple = ()

    def __str__(self) -> str:
        if not self.subst:
            return self.name
        return f"{self.name}[{', '.join(map(str, self.subst))}]"


@dataclass(frozen=True)
class Lam(Term):
    # ty is checker metadata (filled by elaboration); alpha_eq ignores it
    name: str
    ty: Optional[Type]
    body: Term

    def __str__(self) -> str:
        ann = f" : {self.ty}" if self.ty is not None else ""
        return f"(fn {self.name}{ann} -> {self.body})"


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

    def __str__(self) -> str:
        return f"({self.fn} {self.arg})"


@dataclass(frozen=True)
class TLam(Term):
    """Level-annotated type abstraction; `local` is the binder's kind
    context, filled by elaboration and ignored by alpha_eq."""

    name: str
    level: int
    body: Term
    local: Optional["Context"] = None

    def __str__(self) -> str:
        return f"(tfn '{self.name}^{self.level} -> {self.body})"


@dataclass(frozen=True)
class TApp(Term):
    fn: Term
    ctx_hat: ErasedContext
    level: int
    arg: Type

    def __str__(self) -> str:
        hat = ",".join(map(str, self.ctx_hat))
        return f"({self.fn} ({hat}.^{self.level} {self.arg}))"


@dataclass(frozen=True)
class BoxE(Term):
    """Code template box(ctx_hat.^level body); `local` is the full local
    context (checker metadata, ignored by alpha_eq)."""

    ctx_hat: ErasedContext
    level: int
    body: Term
    local: Optional["Context"] = None

    def __str__(self) -> str:
        hat = ",".join(map(str, self.ctx_hat))
        return f"box({hat}.^{self.level} {self.body})"


@dataclass(frozen=True)
class LetBox(Term):
    ctx_hat: ErasedContext
    level: int
    name: str
    bound: Term
    body: Term

    def __str__(self) -> str:
        hat = ",".join(map(str, self.ctx_hat))
        return f"(let box({hat}.^{self.level} {self.name}) = {self.bound} in {self.body})"


@dataclass(frozen=True)
class Branch:
    """One case arm: pat_vars. box(local_hat. pattern) : annot -> body."""

    pat_vars: "Context"
    local_hat: ErasedContext
    pattern: Term
    annot_ctx: "Context"
    annot_level: int
    annot_type: Type
    body: Term


@dataclass(frozen=True)
class Case(Term):
    scrut: Term
    annot: BoxT
    branches: tuple = ()  # tuple[Branch, ...]

    def __str__(self) -> str:
        return f"(case {self.scrut} : {self.annot} of ...{len(self.branches)} branches)"


# --- plumbing: integers, booleans, lists, fixpoints ------------------------


@dataclass(frozen=True)
class IntLit(Term):
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class PrimOp(Term):
    op: str  # one of + - * = <=
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"({self.lhs} {self.op} {self.rhs})"


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    els: Term

    def __str__(self) -> str:
        return f"(if {self.cond} then {self.then} else {self.els})"


@dataclass(frozen=True)
class Nil(Term):
    # element type is elaboration metadata, ignored by alpha_eq
    elem: Optional[Type] = None

    def __str__(self) -> str:
        return "[]"


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term

    def __str__(self) -> str:
        return f"({self.head} :: {self.tail})"


@dataclass(frozen=True)
class Hd(Term):
    arg: Term

    def __str__(self) -> str:
        return f"(hd {self.arg})"


@dataclass(frozen=True)
class Tl(Term):
    arg: Term

    def __str__(self) -> str:
        return f"(tl {self.arg})"


@dataclass(frozen=True)
class IsNil(Term):
    arg: Term

    def __str__(self) -> str:
        return f"(isnil {self.arg})"


@dataclass(frozen=True)
class Fix(Term):
    name: str
    ty: Optional[Type]
    body: Term

    def __str__(self) -> str:
        return f"(fix {self.name}. {self.body})"


# ---------------------------------------------------------------------------
# substitution entries


@dataclass(frozen=True)
class CTerm:
    """Contextual term entry (ctx_hat.^level term)."""

    ctx_hat: ErasedContext
    level: int
    term: Term

    def __str__(self) -> str:
        hat = ",".join(map(str, self.ctx_hat))
        return f"({hat}.^{self.level} {self.term})"


@dataclass(frozen=True)
class CType:
    """Contextual type entry (ctx_hat.^level type)."""

    ctx_hat: ErasedContext
    level: int
    type: Type

    def __str__(self) -> str:
        hat = ",".join(map(str, self.ctx_hat))
        return f"({hat}.^{self.level} {self.type})"


@dataclass(frozen=True)
class RenameTerm:
    name: str
    level: int

    def __str__(self) -> str:
        return f"{self.name}^{self.level}"


@dataclass(frozen=True)
class RenameType:
    name: str
    level: int

    def __str__(self) -> str:
        return f"'{self.name}^{self.level}"


SubstEntry = Union[CTerm, CType, RenameTerm, RenameType]
Subst = tuple  # tuple[SubstEntry, ...]


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class TermDecl:
    name: str
    local: "Context"
    level: int
    type: Type

    def __str__(self) -> str:
        return f"{self.name}:({self.local} |-^{self.level} {self.type})"


@dataclass(frozen=True)
class TypeDecl:
    name: str
    local: "Context"
    level: int

    def __str__(self) -> str:
        return f"'{self.name}:({self.local} |-^{self.level} *)"


@dataclass(frozen=True)
class TypeConstraint:
    """Solved type declaration 'name := (solution_hat. solution)."""

    name: str
    local: "Context"
    level: int
    solution_hat: ErasedContext
    solution: Type

    def __str__(self) -> str:
        hat = ",".join(map(str, self.solution_hat))
        return f"'{self.name}:=({hat}. {self.solution}):({self.local} |-^{self.level} *)"


CtxEntry = Union[TermDecl, TypeDecl, TypeConstraint]


@dataclass(frozen=True)
class Context:
    """Level-sorted declaration list; `contradiction` is the # marker.

    Construction rejects out-of-order levels and duplicate names, so a
    Context is level-sorted by construction.
    """

    entries: tuple = ()
    contradiction: bool = False

    def __post_init__(self) -> None:
        seen = set()
        prev = None
        for d in self.entries:
            if d.name in seen:
                raise ValueError(f"duplicate declaration {d.name!r} in context")
            seen.add(d.name)
            if prev is not None and d.level > prev:
                raise ValueError(
                    f"context not level-sorted: {d.name!r}@{d.level} after level {prev}"
                )
            prev = d.level
            if level_of(d.local) > d.level:
                raise ValueError(
                    f"local context of {d.name!r} exceeds its level {d.level}"
                )

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        body = ", ".join(str(d) for d in self.entries)
        if self.contradiction:
            body = f"{body}, #" if body else "#"
        return body or "."

    def names(self) -> frozenset:
        return frozenset(d.name for d in self.entries)

    def with_contradiction(self) -> "Context":
        if self.contradiction:
            return self
        return Context(self.entries, True)


EMPTY = Context()


def level_of(ctx) -> int:
    """Minimal level n with every declaration strictly below n."""
    if isinstance(ctx, Context):
        levels = [d.level for d in ctx.entries]
    else:  # erased context
        levels = [v.level for v in ctx]
    return max(levels) + 1 if levels else 0


def erase(ctx: Context) -> ErasedContext:
    """Name/level skeleton of a pure context.

    Solved declarations and the contradiction marker have no place in a
    binder, so impure contexts are rejected.
    """
    if ctx.contradiction:
        raise ValueError("cannot erase a contradictory context")
    hat = []
    for d in ctx.entries:
        if isinstance(d, TypeConstraint):
            raise ValueError(f"cannot erase solved declaration {d.name!r}")
        hat.append(HatVar(d.name, d.level, isinstance(d, TypeDecl)))
    return tuple(hat)


def hat_of(ctx: Context) -> ErasedContext:
    """Like erase but tolerates solved declarations (they erase to their
    underlying type declaration).  Used when substituting under refined
    contexts."""
    if ctx.contradiction:
        raise ValueError("cannot erase a contradictory context")
    return tuple(
        HatVar(d.name, d.level, not isinstance(d, TermDecl)) for d in ctx.entries
    )


# ---------------------------------------------------------------------------
# free names and renaming

# A single name space covers term and type variables; the parser keeps
# them apart ('-prefix), so a shared free-name set is safe for freshness.


def free_names(node) -> frozenset:
    acc: set = set()
    if isinstance(node, Context):
        _free_ctx(node, acc, frozenset())
    else:
        _free(node, acc, frozenset())
    return frozenset(acc)


def _free_subst(subst: tuple, acc: set, bound: frozenset) -> None:
    for ent in subst:
        match ent:
            case RenameTerm(name=n) | RenameType(name=n):
                if n not in bound:
                    acc.add(n)
            case CTerm(ctx_hat=hat, term=e):
                _free(e, acc, bound | {v.name for v in hat})
            case CType(ctx_hat=hat, type=t):
                _free(t, acc, bound | {v.name for v in hat})


def _free_ctx(ctx: Context, acc: set, bound: frozenset) -> frozenset:
    """Free names of a context; returns bound extended with its names."""
    for d in ctx.entries:
        inner = _free_ctx(d.local, acc, bound)
        if isinstance(d, TermDecl):
            _free(d.type, acc, inner)
        elif isinstance(d, TypeConstraint):
            _free(d.solution, acc, inner | {v.name for v in d.solution_hat})
        bound = bound | {d.name}
    return bound


def _free(node, acc: set, bound: frozenset) -> None:
    match node:
        case None:
            pass
        case TVar(name=n, subst=s) | Var(name=n, subst=s):
            if n not in bound:
                acc.add(n)
            _free_subst(s, acc, bound)
        case Arrow(dom=a, cod=b):
            _free(a, acc, bound)
            _free(b, acc, bound)
        case Forall(name=n, local=loc, level=_, body=b):
            inner = _free_ctx(loc, acc, bound)
            _free(b, acc, inner | {n})
        case BoxT(local=loc, body=b):
            inner = _free_ctx(loc, acc, bound)
            _free(b, acc, inner)
        case IntT() | BoolT() | IntLit() | BoolLit():
            pass
        case ListT(elem=t):
            _free(t, acc, bound)
        case Lam(name=n, ty=t, body=b) | Fix(name=n, ty=t, body=b):
            _free(t, acc, bound)
            _free(b, acc, bound | {n})
        case App(fn=f, arg=a):
            _free(f, acc, bound)
            _free(a, acc, bound)
        case TLam(name=n, body=b, local=loc):
            if loc is not None:
                _free_ctx(loc, acc, bound)
            _free(b, acc, bound | {n})
        case TApp(fn=f, ctx_hat=hat, arg=t):
            _free(f, acc, bound)
            _free(t, acc, bound | {v.name for v in hat})
        case BoxE(ctx_hat=hat, body=b, local=loc):
            if loc is not None:
                _free_ctx(loc, acc, bound)
            _free(b, acc, bound | {v.name for v in hat})
        case LetBox(ctx_hat=_, name=n, bound=e1, body=e2):
            _free(e1, acc, bound)
            _free(e2, acc, bound | {n})
        case Case(scrut=e, annot=t, branches=bs):
            _free(e, acc, bound)
            _free(t, acc, bound)
            for br in bs:
                inner = _free_ctx(br.pat_vars, acc, bound)
                inner2 = _free_ctx(br.annot_ctx, acc, inner)
                _free(br.annot_type, acc, inner2)
                _free(br.pattern, acc, inner | {v.name for v in br.local_hat})
                _free(br.body, acc, inner)
        case PrimOp(lhs=a, rhs=b) | Cons(head=a, tail=b):
            _free(a, acc, bound)
            _free(b, acc, bound)
        case If(cond=c, then=t, els=e):
            _free(c, acc, bound)
            _free(t, acc, bound)
            _free(e, acc, bound)
        case Nil(elem=t):
            _free(t, acc, bound)
        case Hd(arg=a) | Tl(arg=a) | IsNil(arg=a):
            _free(a, acc, bound)
        case _:
            raise TypeError(f"free_names: unexpected node {node!r}")


def fresh_name(base: str, avoid) -> str:
    """Deterministic fresh name: strip the digit suffix, count up."""
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789") or "x"
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def rename(node, mapping: dict):
    """Simultaneous free-name renaming, respecting shadowing binders.

    Binders themselves are never renamed; entries of `mapping` hidden by
    a binder of the same name stop applying underneath it.
    """
    if not mapping:
        return node
    if isinstance(node, Context):
        return _ren_ctx(node, mapping)[0]
    return _ren(node, mapping)


def _drop(mapping: dict, names) -> dict:
    names = set(names)
    return {k: v for k, v in mapping.items() if k not in names}


def _ren_subst(subst: tuple, m: dict) -> tuple:
    out = []
    for ent in subst:
        match ent:
            case RenameTerm(name=n, level=k):
                out.append(RenameTerm(m.get(n, n), k))
            case RenameType(name=n, level=k):
                out.append(RenameType(m.get(n, n), k))
            case CTerm(ctx_hat=hat, level=k, term=e):
                m2 = _drop(m, (v.name for v in hat))
                out.append(CTerm(hat, k, _ren(e, m2) if m2 else e))
            case CType(ctx_hat=hat, level=k, type=t):
                m2 = _drop(m, (v.name for v in hat))
                out.append(CType(hat, k, _ren(t, m2) if m2 else t))
    return tuple(out)


def _ren_ctx(ctx: Context, m: dict):
    """Rename free occurrences inside a context; its own names shadow."""
    out = []
    for d in ctx.entries:
        local, inner = _ren_ctx(d.local, m)
        match d:
            case TermDecl(name=n, level=k, type=t):
                out.append(TermDecl(n, local, k, _ren(t, inner) if inner else t))
            case TypeDecl(name=n, level=k):
                out.append(TypeDecl(n, local, k))
            case TypeConstraint(name=n, level=k, solution_hat=hat, solution=s):
                mi = _drop(inner, (v.name for v in hat))
                out.append(
                    TypeConstraint(n, local, k, hat, _ren(s, mi) if mi else s)
                )
        m = _drop(m, [d.name])
    return Context(tuple(out), ctx.contradiction), m


def _ren(node, m: dict):
    if not m:
        return node
    match node:
        case None:
            return None
        case TVar(name=n, subst=s):
            return TVar(m.get(n, n), _ren_subst(s, m))
        case Var(name=n, subst=s):
            return Var(m.get(n, n), _ren_subst(s, m))
        case Arrow(dom=a, cod=b):
            return Arrow(_ren(a, m), _ren(b, m))
        case Forall(name=n, local=loc, level=k, body=b):
            loc2, m2 = _ren_ctx(loc, m)
            m3 = _drop(m2, [n])
            return Forall(n, loc2, k, _ren(b, m3))
        case BoxT(local=loc, level=k, body=b):
            loc2, m2 = _ren_ctx(loc, m)
            return BoxT(loc2, k, _ren(b, m2))
        case IntT() | BoolT() | IntLit() | BoolLit():
            return node
        case ListT(elem=t):
            return ListT(_ren(t, m))
        case Lam(name=n, ty=t, body=b):
            m2 = _drop(m, [n])
            return Lam(n, _ren(t, m), _ren(b, m2))
        case Fix(name=n, ty=t, body=b):
            m2 = _drop(m, [n])
            return Fix(n, _ren(t, m), _ren(b, m2))
        case App(fn=f, arg=a):
            return App(_ren(f, m), _ren(a, m))
        case TLam(name=n, level=k, body=b, local=loc):
            loc2 = _ren_ctx(loc, m)[0] if loc is not None else None
            m2 = _drop(m, [n])
            return TLam(n, k, _ren(b, m2), loc2)
        case TApp(fn=f, ctx_hat=hat, level=k, arg=t):
            m2 = _drop(m, (v.name for v in hat))
            return TApp(_ren(f, m), hat, k, _ren(t, m2))
        case BoxE(ctx_hat=hat, level=k, body=b, local=loc):
            loc2 = _ren_ctx(loc, m)[0] if loc is not None else None
            m2 = _drop(m, (v.name for v in hat))
            return BoxE(hat, k, _ren(b, m2), loc2)
        case LetBox(ctx_hat=hat, level=k, name=n, bound=e1, body=e2):
            m2 = _drop(m, [n])
            return LetBox(hat, k, n, _ren(e1, m), _ren(e2, m2))
        case Case(scrut=e, annot=t, branches=bs):
            out = []
            for br in bs:
                pv, mi = _ren_ctx(br.pat_vars, m)
                ac, mj = _ren_ctx(br.annot_ctx, mi)
                mp = _drop(mi, (v.name for v in br.local_hat))
                out.append(
                    Branch(
                        pv,
                        br.local_hat,
                        _ren(br.pattern, mp),
                        ac,
                        br.annot_level,
                        _ren(br.annot_type, mj),
                        _ren(br.body, mi),
                    )
                )
            return Case(_ren(e, m), _ren(t, m), tuple(out))
        case PrimOp(op=o, lhs=a, rhs=b):
            return PrimOp(o, _ren(a, m), _ren(b, m))
        case Cons(head=a, tail=b):
            return Cons(_ren(a, m), _ren(b, m))
        case If(cond=c, then=t, els=e):
            return If(_ren(c, m), _ren(t, m), _ren(e, m))
        case Nil(elem=t):
            return Nil(_ren(t, m))
        case Hd(arg=a):
            return Hd(_ren(a, m))
        case Tl(arg=a):
            return Tl(_ren(a, m))
        case IsNil(arg=a):
            return IsNil(_ren(a, m))
        case _:
            raise TypeError(f"rename: unexpected node {node!r}")


def rename_free_in_context(ctx: Context, mapping: dict) -> Context:
    """Rename free occurrences inside a context's entries.  The context's
    own declaration names act as binders and are left untouched."""
    if not mapping:
        return ctx
    return _ren_ctx(ctx, mapping)[0]


def rename_context(ctx: Context, mapping: dict) -> Context:
    """Rename a context's own declaration names (and references to them
    inside later entries).  Distinct from `rename`, which treats the
    context's names as binders."""
    out = []
    m = dict(mapping)
    for d in ctx.entries:
        new = m.get(d.name, d.name)
        local, inner = _ren_ctx(d.local, m)
        match d:
            case TermDecl(level=k, type=t):
                out.append(TermDecl(new, local, k, _ren(t, inner) if inner else t))
            case TypeDecl(level=k):
                out.append(TypeDecl(new, local, k))
            case TypeConstraint(level=k, solution_hat=hat, solution=s):
                mi = _drop(inner, (v.name for v in hat))
                out.append(
                    TypeConstraint(new, local, k, hat, _ren(s, mi) if mi else s)
                )
    return Context(tuple(out), ctx.contradiction)


# ---------------------------------------------------------------------------
# alpha equivalence

# env maps left names to right names at binding sites; renv is the
# inverse, so two distinct left binders cannot collapse onto one right
# name.  Metadata fields (Lam.ty, Fix.ty, Nil.elem, BoxE.local,
# TLam.local) are ignored.


def alpha_eq(a, b) -> bool:
    """Alpha equivalence of two types or two terms (or contexts)."""
    return _aeq(a, b, {}, {})


def _bind(env, renv, l, r):
    env = dict(env)
    renv = dict(renv)
    env[l] = r
    renv[r] = l
    return env, renv


def _name_eq(l, r, env, renv) -> bool:
    if l in env:
        return env[l] == r
    # free on the left: must be the identical free name on the right
    return l == r and r not in renv


def _aeq_hat(h1, h2, env, renv):
    """Pointwise levels/sorts; returns extended envs or None."""
    if len(h1) != len(h2):
        return None
    for v, w in zip(h1, h2):
        if v.level != w.level or v.is_type != w.is_type:
            return None
        env, renv = _bind(env, renv, v.name, w.name)
    return env, renv


def _aeq_subst(s1, s2, env, renv) -> bool:
    if len(s1) != len(s2):
        return False
    for e1, e2 in zip(s1, s2):
        match e1, e2:
            case (RenameTerm(name=n1, level=k1), RenameTerm(name=n2, level=k2)) | (
                RenameType(name=n1, level=k1),
                RenameType(name=n2, level=k2),
            ):
                if k1 != k2 or not _name_eq(n1, n2, env, renv):
                    return False
            case (CTerm(ctx_hat=h1, level=k1, term=x1), CTerm(ctx_hat=h2, level=k2, term=x2)) | (
                CType(ctx_hat=h1, level=k1, type=x1),
                CType(ctx_hat=h2, level=k2, type=x2),
            ):
                if k1 != k2:
                    return False
                ext = _aeq_hat(h1, h2, env, renv)
                if ext is None or not _aeq(x1, x2, *ext):
                    return False
            case _:
                return False
    return True


def _aeq_ctx(c1: Context, c2: Context, env, renv):
    """Compare contexts entry-wise; returns extended envs or None."""
    if c1.contradiction != c2.contradiction or len(c1) != len(c2):
        return None
    for d1, d2 in zip(c1.entries, c2.entries):
        if type(d1) is not type(d2) or d1.level != d2.level:
            return None
        ext = _aeq_ctx(d1.local, d2.local, env, renv)
        if ext is None:
            return None
        if isinstance(d1, TermDecl):
            if not _aeq(d1.type, d2.type, *ext):
                return None
        elif isinstance(d1, TypeConstraint):
            inner = _aeq_hat(d1.solution_hat, d2.solution_hat, *ext)
            if inner is None or not _aeq(d1.solution, d2.solution, *inner):
                return None
        env, renv = _bind(env, renv, d1.name, d2.name)
    return env, renv


def _aeq(a, b, env, renv) -> bool:
    match a, b:
        case (TVar(name=n1, subst=s1), TVar(name=n2, subst=s2)) | (
            Var(name=n1, subst=s1),
            Var(name=n2, subst=s2),
        ):
            return type(a) is type(b) and _name_eq(n1, n2, env, renv) and _aeq_subst(
                s1, s2, env, renv
            )
        case Arrow(dom=a1, cod=b1), Arrow(dom=a2, cod=b2):
            return _aeq(a1, a2, env, renv) and _aeq(b1, b2, env, renv)
        case Forall(name=n1, local=l1, level=k1, body=b1), Forall(
            name=n2, local=l2, level=k2, body=b2
        ):
            if k1 != k2:
                return False
            ext = _aeq_ctx(l1, l2, env, renv)
            if ext is None:
                return False
            return _aeq(b1, b2, *_bind(*ext, n1, n2))
        case BoxT(local=l1, level=k1, body=b1), BoxT(local=l2, level=k2, body=b2):
            if k1 != k2:
                return False
            ext = _aeq_ctx(l1, l2, env, renv)
            return ext is not None and _aeq(b1, b2, *ext)
        case (IntT(), IntT()) | (BoolT(), BoolT()):
            return True
        case ListT(elem=t1), ListT(elem=t2):
            return _aeq(t1, t2, env, renv)
        case Lam(name=n1, body=b1), Lam(name=n2, body=b2):
            return _aeq(b1, b2, *_bind(env, renv, n1, n2))
        case Fix(name=n1, body=b1), Fix(name=n2, body=b2):
            return _aeq(b1, b2, *_bind(env, renv, n1, n2))
        case App(fn=f1, arg=a1), App(fn=f2, arg=a2):
            return _aeq(f1, f2, env, renv) and _aeq(a1, a2, env, renv)
        case TLam(name=n1, level=k1, body=b1), TLam(name=n2, level=k2, body=b2):
            return k1 == k2 and _aeq(b1, b2, *_bind(env, renv, n1, n2))
        case TApp(fn=f1, ctx_hat=h1, level=k1, arg=t1), TApp(
            fn=f2, ctx_hat=h2, level=k2, arg=t2
        ):
            if k1 != k2 or not _aeq(f1, f2, env, renv):
                return False
            ext = _aeq_hat(h1, h2, env, renv)
            return ext is not None and _aeq(t1, t2, *ext)
        case BoxE(ctx_hat=h1, level=k1, body=b1), BoxE(ctx_hat=h2, level=k2, body=b2):
            if k1 != k2:
                return False
            ext = _aeq_hat(h1, h2, env, renv)
            return ext is not None and _aeq(b1, b2, *ext)
        case LetBox(ctx_hat=h1, level=k1, name=n1, bound=e1, body=b1), LetBox(
            ctx_hat=h2, level=k2, name=n2, bound=e2, body=b2
        ):
            if k1 != k2 or not _aeq(e1, e2, env, renv):
                return False
            ext = _aeq_hat(h1, h2, env, renv)
            if ext is None:
                return False
            return _aeq(b1, b2, *_bind(*ext, n1, n2))
        case Case(scrut=e1, annot=t1, branches=bs1), Case(
            scrut=e2, annot=t2, branches=bs2
        ):
            if len(bs1) != len(bs2):
                return False
            if not (_aeq(e1, e2, env, renv) and _aeq(t1, t2, env, renv)):
                return False
            for x, y in zip(bs1, bs2):
                if x.annot_level != y.annot_level:
                    return False
                ext = _aeq_ctx(x.pat_vars, y.pat_vars, env, renv)
                if ext is None:
                    return False
                ext2 = _aeq_ctx(x.annot_ctx, y.annot_ctx, *ext)
                if ext2 is None or not _aeq(x.annot_type, y.annot_type, *ext2):
                    return False
                hat = _aeq_hat(x.local_hat, y.local_hat, *ext)
                if hat is None or not _aeq(x.pattern, y.pattern, *hat):
                    return False
                if not _aeq(x.body, y.body, *ext):
                    return False
            return True
        case IntLit(value=v1), IntLit(value=v2):
            return v1 == v2
        case BoolLit(value=v1), BoolLit(value=v2):
            return v1 == v2
        case PrimOp(op=o1, lhs=a1, rhs=b1), PrimOp(op=o2, lhs=a2, rhs=b2):
            return o1 == o2 and _aeq(a1, a2, env, renv) and _aeq(b1, b2, env, renv)
        case If(cond=c1, then=t1, els=e1), If(cond=c2, then=t2, els=e2):
            return (
                _aeq(c1, c2, env, renv)
                and _aeq(t1, t2, env, renv)
                and _aeq(e1, e2, env, renv)
            )
        case Nil(), Nil():
            return True
        case Cons(head=a1, tail=b1), Cons(head=a2, tail=b2):
            return _aeq(a1, a2, env, renv) and _aeq(b1, b2, env, renv)
        case (Hd(arg=a1), Hd(arg=a2)) | (Tl(arg=a1), Tl(arg=a2)) | (
            IsNil(arg=a1),
            IsNil(arg=a2),
        ):
            return type(a) is type(b) and _aeq(a1, a2, env, renv)
        case Context(), Context():
            return _aeq_ctx(a, b, env, renv) is not None
        case _:
            return False
