"""Surface printer for core terms and types.

The invariant that matters: the printed text parses and elaborates back to
an alpha-equivalent core term.  Two styles share that guarantee against
different readers.  The full style (`annotate=True`) writes every binder
annotation and box level, so its output re-elaborates standalone, in
inferring position.  The display style (`annotate=False`) drops whatever
checking against a known expected type restores: binder annotations, box
levels that match their context, empty-list annotations.  Both styles elide
a closure only when the printer can see the variable's full declaration and
the closure is its identity, and both always print a payload-carrying
closure entry in the `(binders. payload)` form, never as a bare name, since
a renaming and an eta-expanded payload are different substitutions.

`to_sexp` renders the raw core tree instead, one node per line, for
inspection rather than reparsing.
"""

from __future__ import annotations

import dataclasses

from .syntax import (
    EMPTY,
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
    level_of,
)

# precedence floors: a node prints parenthesized when the context demands
# tighter binding than the node provides
_CMP, _CONS, _ADD, _MUL, _UNARY, _APP, _ATOM = 0, 1, 2, 3, 4, 5, 6


def pretty_term(e, env: dict | None = None, annotate: bool = True) -> str:
    return _tm(e, dict(env or {}), 0, annotate)


def pretty_type(t, env: dict | None = None, annotate: bool = True) -> str:
    return _ty(t, dict(env or {}), 0, annotate)


def pretty_context(ctx: Context, env: dict | None = None) -> str:
    return _decls(ctx, dict(env or {}), True)


def _default_level(local: Context) -> int:
    return max(level_of(local), 1)


# ---- types -----------------------------------------------------------------


def _ty(t, env: dict, prec: int, full: bool) -> str:
    match t:
        case IntT():
            return "int"
        case BoolT():
            return "bool"
        case ListT(elem=e):
            return f"{_ty(e, env, 1, full)} list"
        case Arrow(dom=d, cod=c):
            s = f"{_ty(d, env, 1, full)} -> {_ty(c, env, 0, full)}"
            return f"({s})" if prec > 0 else s
        case Forall(name=a, local=loc, level=n, body=b):
            env2 = dict(env)
            env2[a] = loc
            if not full and not loc.entries and n == 0:
                s = f"forall '{a}. {_ty(b, env2, 0, full)}"
            else:
                k = _kind(loc, n, env, full)
                s = f"('{a} : {k}) -> {_ty(b, env2, 0, full)}"
            return f"({s})" if prec > 0 else s
        case BoxT(local=loc, level=n, body=b):
            env2 = _with_ctx(env, loc)
            body = _ty(b, env2, 0, full)
            decls = _decls(loc, env, full)
            if not full and n == _default_level(loc):
                return f"[{body}]" if not loc.entries else f"[{decls} |- {body}]"
            return f"[{decls} |-^{n} {body}]"
        case TVar(name=a, subst=s):
            return _occ(a, s, env, True, full)
        case _:
            raise TypeError(f"pretty: unexpected type {t!r}")


def _kind(loc: Context, n: int, env: dict, full: bool) -> str:
    if not loc.entries and n == 0:
        return "*"
    if not full and not loc.entries and n == _default_level(loc):
        return "( |- *)"
    return f"({_decls(loc, env, full)} |-^{n} *)"


def _annot(d, env: dict, full: bool) -> str:
    """The annotation of one declaration, as written after its colon."""
    if isinstance(d, (TypeDecl, TypeConstraint)):
        return _kind(d.local, d.level, env, full)
    if not d.local.entries and d.level == 0:
        t = _ty(d.type, env, 0, full)
        return f"({t})" if "," in t else t
    env2 = _with_ctx(env, d.local)
    return (
        f"({_decls(d.local, env, full)} |-^{d.level} {_ty(d.type, env2, 0, full)})"
    )


def _decls(ctx: Context, env: dict, full: bool) -> str:
    out = []
    cur = dict(env)
    for d in ctx.entries:
        shown = f"'{d.name}" if isinstance(d, (TypeDecl, TypeConstraint)) else d.name
        out.append(f"{shown} : {_annot(d, cur, full)}")
        cur[d.name] = d.local
    return ", ".join(out)


def _with_ctx(env: dict, ctx: Context) -> dict:
    env2 = dict(env)
    for d in ctx.entries:
        env2[d.name] = d.local
    return env2


# ---- closures ---------------------------------------------------------------


def _is_identity(subst: tuple, loc) -> bool:
    if not isinstance(loc, Context):
        return subst == ()
    if len(subst) != len(loc.entries):
        return False
    for en, d in zip(subst, loc.entries):
        match en:
            case RenameTerm(name=y, level=k):
                if isinstance(d, (TypeDecl, TypeConstraint)):
                    return False
                if y != d.name or k != d.level:
                    return False
            case RenameType(name=b, level=k):
                if not isinstance(d, (TypeDecl, TypeConstraint)):
                    return False
                if b != d.name or k != d.level:
                    return False
            case _:
                return False
    return True


def _occ(name: str, subst: tuple, env: dict, tick: bool, full: bool) -> str:
    shown = f"'{name}" if tick else name
    if subst == () or _is_identity(subst, env.get(name)):
        return shown
    entries = ", ".join(_sentry(en, env, full) for en in subst)
    return f"({shown} with {entries})"


def _hat_names(hat: tuple) -> str:
    return ", ".join((f"'{v.name}" if v.is_type else v.name) for v in hat)


def _hat_env(env: dict, hat: tuple) -> dict:
    env2 = dict(env)
    for v in hat:
        env2[v.name] = None
    return env2


def _sentry(en, env: dict, full: bool) -> str:
    match en:
        case RenameTerm(name=y):
            return y
        case RenameType(name=b):
            return f"'{b}"
        case CTerm(ctx_hat=hat, level=_, term=e):
            return f"({_hat_names(hat)}. {_tm(e, _hat_env(env, hat), 0, full, False)})"
        case CType(ctx_hat=hat, level=_, type=t):
            return f"({_hat_names(hat)}. {_ty(t, _hat_env(env, hat), 0, full)})"
        case _:
            raise TypeError(f"pretty: unexpected closure entry {en!r}")


# ---- terms ----------------------------------------------------------------


def _wrap(s: str, prec: int, floor: int) -> str:
    return f"({s})" if prec > floor else s


def _tm(e, env: dict, prec: int, full: bool, chk: bool = True) -> str:
    """`chk` says whether the reparse will check this position against a
    known expected type; where it will not (a let-box bound, an applied
    head, an argument of hd/tl/isnil), display style keeps the annotations
    inference needs."""
    match e:
        case IntLit(value=v):
            return str(v)
        case BoolLit(value=v):
            return "true" if v else "false"
        case Var(name=x, subst=s):
            return _occ(x, s, env, False, full)
        case Lam(name=x, ty=t, body=b):
            env2 = dict(env)
            env2[x] = EMPTY
            if full or not chk:
                s = f"fn ({x} : {_ty(t, env, 0, full)}) -> {_tm(b, env2, 0, full, chk)}"
            else:
                s = f"fn {x} -> {_tm(b, env2, 0, full, chk)}"
            return _wrap(s, prec, 0)
        case App(fn=Lam(name=x, body=b), arg=a) if not full:
            # prints as a redex: the argument's type annotates the parameter
            env2 = dict(env)
            env2[x] = EMPTY
            fn = f"fn {x} -> {_tm(b, env2, 0, full, chk)}"
            s = f"({fn}) {_tm(a, env, _ATOM, full, False)}"
            return _wrap(s, prec, _APP)
        case App(fn=f, arg=a):
            s = f"{_tm(f, env, _APP, full, False)} {_tm(a, env, _ATOM, full)}"
            return _wrap(s, prec, _APP)
        case TLam(name=a, level=n, body=b, local=loc):
            loc = loc if loc is not None else EMPTY
            env2 = dict(env)
            env2[a] = loc
            if full or not chk:
                s = (
                    f"tfn ('{a} : {_kind(loc, n, env, full)}) -> "
                    f"{_tm(b, env2, 0, full, chk)}"
                )
            else:
                s = f"tfn '{a} -> {_tm(b, env2, 0, full, chk)}"
            return _wrap(s, prec, 0)
        case TApp(fn=f, ctx_hat=hat, level=_, arg=t):
            arg = f"({_hat_names(hat)}. {_ty(t, _hat_env(env, hat), 0, full)})"
            s = f"{_tm(f, env, _APP, full, False)} {arg}"
            return _wrap(s, prec, _APP)
        case BoxE(ctx_hat=hat, level=n, body=b, local=loc):
            env2 = _with_ctx(env, loc) if loc is not None else _hat_env(env, hat)
            body = _tm(b, env2, 0, full, chk)
            if loc is not None and (full or not chk):
                binders = _decls(loc, env, full)
            else:
                binders = _hat_names(hat)
            lvl = f"^{n}"
            if not full and loc is not None and n == _default_level(loc):
                lvl = ""
            if binders:
                return f"box{lvl}({binders}. {body})"
            return f"box{lvl}({body})"
        case LetBox(ctx_hat=hat, level=_, name=u, bound=e1, body=e2):
            env2 = dict(env)
            env2[u] = None
            head = f"let box({_hat_names(hat)}. {u})" if hat else f"let box {u}"
            s = (
                f"{head} = {_tm(e1, env, 0, full, False)} in "
                f"{_tm(e2, env2, 0, full, chk)}"
            )
            return _wrap(s, prec, 0)
        case Fix(name=f, ty=t, body=b):
            env2 = dict(env)
            env2[f] = EMPTY
            s = f"fix ({f} : {_ty(t, env, 0, full)}) -> {_tm(b, env2, 0, full)}"
            return _wrap(s, prec, 0)
        case Case(scrut=sc, annot=a, branches=bs):
            parts = []
            for i, br in enumerate(bs):
                parts.append(_branch(br, env, full, chk if i == 0 else True))
            s = (
                f"case {_tm(sc, env, 0, full)} : {_ty(a, env, 0, full)} of "
                f"{' '.join(parts)}"
            )
            return _wrap(s, prec, 0)
        case Cons(head=h, tail=t):
            s = f"{_tm(h, env, _ADD, full, chk)} :: {_tm(t, env, _CONS, full)}"
            return _wrap(s, prec, _CONS)
        case Nil(elem=t):
            if full or not chk:
                return f"([] : {_ty(t, env, 1, full)} list)"
            return "[]"
        case If(cond=c, then=t, els=el):
            s = (
                f"if {_tm(c, env, 0, full)} then {_tm(t, env, 0, full, chk)} "
                f"else {_tm(el, env, 0, full)}"
            )
            return _wrap(s, prec, 0)
        case PrimOp(op=o, lhs=l, rhs=r):
            if o in ("=", "<="):
                s = f"{_tm(l, env, _CONS, full)} {o} {_tm(r, env, _CONS, full)}"
                return _wrap(s, prec, _CMP)
            if o == "*":
                s = f"{_tm(l, env, _MUL, full)} * {_tm(r, env, _UNARY, full)}"
                return _wrap(s, prec, _MUL)
            s = f"{_tm(l, env, _ADD, full)} {o} {_tm(r, env, _MUL, full)}"
            return _wrap(s, prec, _ADD)
        case Hd(arg=a):
            return _wrap(f"hd {_tm(a, env, _ATOM, full, False)}", prec, _UNARY)
        case Tl(arg=a):
            return _wrap(f"tl {_tm(a, env, _ATOM, full, False)}", prec, _UNARY)
        case IsNil(arg=a):
            return _wrap(f"isnil {_tm(a, env, _ATOM, full, False)}", prec, _UNARY)
        case _:
            raise TypeError(f"pretty: unexpected term {e!r}")


def _branch(br, env: dict, full: bool, chk: bool = True) -> str:
    sig = ""
    if br.pat_vars.entries:
        cur = dict(env)
        parts = []
        for d in br.pat_vars.entries:
            shown = (
                f"'{d.name}" if isinstance(d, (TypeDecl, TypeConstraint)) else d.name
            )
            parts.append(f"({shown} : {_annot(d, cur, full)})")
            cur[d.name] = d.local
        sig = ", ".join(parts) + ". "
    penv = _with_ctx(_with_ctx(env, br.pat_vars), br.annot_ctx)
    if br.annot_ctx.entries:
        pat = (
            f"box^{br.annot_level}({_hat_names(br.local_hat)}. "
            f"{_tm(br.pattern, penv, 0, full)})"
        )
    else:
        pat = f"box^{br.annot_level}({_tm(br.pattern, penv, 0, full)})"
    annot = (
        f"[{_decls(br.annot_ctx, env, full)} |-^{br.annot_level} "
        f"{_ty(br.annot_type, penv, 0, full)}]"
    )
    benv = _with_ctx(env, br.pat_vars)
    return f"| {sig}{pat} : {annot} -> {_tm(br.body, benv, 0, full, chk)}"


# ---- raw tree -------------------------------------------------------------


def to_sexp(node) -> str:
    """The core tree as an indented s-expression, one node per line."""
    lines: list[str] = []
    _sx(node, 0, lines)
    return "\n".join(lines)


def _atom_repr(v) -> str | None:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return repr(v)
    return None


def _inline(v) -> str | None:
    """Render small leaves inline; return None for anything structured."""
    a = _atom_repr(v)
    if a is not None:
        return a
    if dataclasses.is_dataclass(v):
        vals = [getattr(v, f.name) for f in dataclasses.fields(v)]
        parts = [_atom_repr(x) for x in vals]
        if all(p is not None for p in parts):
            inner = " ".join([v.__class__.__name__, *parts]).rstrip()
            return f"({inner})"
    if isinstance(v, tuple) and not v:
        return "()"
    return None


def _sx(v, depth: int, lines: list) -> None:
    pad = "  " * depth
    s = _inline(v)
    if s is not None:
        lines.append(pad + s)
        return
    if isinstance(v, tuple):
        lines.append(pad + "(")
        for x in v:
            _sx(x, depth + 1, lines)
        lines.append(pad + ")")
        return
    if dataclasses.is_dataclass(v):
        name = v.__class__.__name__
        lines.append(f"{pad}({name}")
        for f in dataclasses.fields(v):
            x = getattr(v, f.name)
            inline = _inline(x)
            if inline is not None:
                lines.append(f"{pad}  {f.name}={inline}")
            else:
                lines.append(f"{pad}  {f.name}=")
                _sx(x, depth + 2, lines)
        lines.append(pad + ")")
        return
    raise TypeError(f"to_sexp: unexpected value {v!r}")
