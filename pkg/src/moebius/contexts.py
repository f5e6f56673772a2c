"""Structural operations on level-sorted contexts.

merge interleaves two sorted contexts, stable in the sense that
equal-level declarations from the right argument land to the right of
the left argument's.  chop_lower keeps the segment at or above a level,
chop_upper the segment strictly below; append concatenates when the
levels already agree.  The contradiction flag is preserved by the chops
and or-ed by merge/append, so

    append(chop_lower(g, n), chop_upper(g, n)) == g

holds for every context and level.
"""

from __future__ import annotations

from .syntax import (
    Context,
    CtxEntry,
    ErasedContext,
    HatVar,
    RenameTerm,
    RenameType,
    TermDecl,
    TypeConstraint,
    TypeDecl,
)


def merge(psi: Context, phi: Context) -> Context:
    """Interleave two level-sorted contexts into one.

    Walking from the right: the right argument's entry is taken whenever
    its level is <= the left's, so equal levels keep right-argument
    entries rightmost.  Duplicate names are rejected.
    """
    left = list(psi.entries)
    right = list(phi.entries)
    out: list = []
    while left and right:
        if right[-1].level <= left[-1].level:
            out.append(right.pop())
        else:
            out.append(left.pop())
    out.extend(reversed(left or right))
    out.reverse()
    return Context(tuple(out), psi.contradiction or phi.contradiction)


def chop_lower(psi: Context, n: int) -> Context:
    """Keep declarations at level >= n (the left segment)."""
    kept = tuple(d for d in psi.entries if d.level >= n)
    return Context(kept, psi.contradiction)


def chop_upper(psi: Context, n: int) -> Context:
    """Keep declarations at level < n (the right segment)."""
    kept = tuple(d for d in psi.entries if d.level < n)
    return Context(kept, psi.contradiction)


def append(psi: Context, phi: Context) -> Context:
    """Concatenate; defined only when the result is still level-sorted
    (every left level >= every right level).  Violations raise."""
    return Context(
        psi.entries + phi.entries, psi.contradiction or phi.contradiction
    )


def insert(gamma: Context, decl: CtxEntry) -> Context:
    """Merge a single declaration into its sorted position (after any
    existing declarations of the same level)."""
    return merge(gamma, Context((decl,)))


def id_subst(phi_hat: ErasedContext) -> tuple:
    """Identity substitution for an erased context: all renames."""
    return tuple(
        RenameType(v.name, v.level) if v.is_type else RenameTerm(v.name, v.level)
        for v in phi_hat
    )


def lookup_decl(gamma: Context, name: str):
    """Find a declaration by name; None when absent."""
    for d in gamma.entries:
        if d.name == name:
            return d
    return None
