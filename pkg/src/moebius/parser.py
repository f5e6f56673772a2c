"""Lexer and parser for the surface language.

The parser produces a lightweight surface tree; levels, local contexts and
delayed substitutions that the writer may omit are restored later by
`elaborate`.  One piece stays deliberately unparsed here: the entries of a
`with` closure.  Whether `(x. e)` carries a term or a type payload depends
on the declaration the closure is applied to, which only the elaborator
knows, so closure entries are kept as raw token spans and parsed on demand
through `reparse_entry` / `parse_span_term` / `parse_span_type`.

`with` is greedy: it consumes comma-separated entries until a token that
cannot continue an entry (a closing bracket, an operator, `in`, `then`,
`of`, ...).  Wrap the closure in parentheses, `x with (e1, e2)`, to delimit
it explicitly; the wrapper also lets entries contain otherwise-terminating
keywords.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

# ---------------------------------------------------------------------------
# tokens

KEYWORDS = frozenset(
    {
        "fn", "fun", "tfn", "box", "let", "in", "if", "then", "else",
        "true", "false", "case", "match", "of", "with", "hd", "tl",
        "isnil", "fix", "rec", "forall", "int", "bool", "list",
    }
)

# longest first so `|-` wins over `|` and `<=` over `<`
_PUNCT = ("|-", "->", "::", "<=", "^", ".", ",", ":", ";", "|", "=",
          "(", ")", "[", "]", "*", "+", "-")

_NAME_START = frozenset("abcdefghijklmnopqrstuvwxyz" "ABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CHARS = _NAME_START | frozenset("0123456789'")


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "name" | "tname" | "eof" | the punctuation/keyword itself
    text: str
    line: int
    col: int


def tokenize(src: str) -> list:
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c == "'" and i + 1 < n and src[i + 1] in _NAME_START:
            j = i + 1
            while j < n and src[j] in _NAME_CHARS:
                j += 1
            toks.append(Token("tname", src[i + 1 : j], line, start_col))
            col += j - i
            i = j
            continue
        if c in _NAME_START:
            j = i
            while j < n and src[j] in _NAME_CHARS:
                j += 1
            word = src[i:j]
            kind = word if word in KEYWORDS else "name"
            toks.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"stray character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# surface tree


@dataclass(frozen=True)
class SAnnot:
    """The payload of a `name : ...` annotation: (local |-^level type).

    A plain type is local=(), level=0.  level None means "use the default
    for this local context".  type None stands for the kind `*`.
    """

    local: tuple  # tuple[SDecl, ...]
    level: Optional[int]
    type: object


@dataclass(frozen=True)
class SDecl:
    name: str
    is_type: bool
    annot: SAnnot


@dataclass(frozen=True)
class SBinder:
    """A box / let-box / pattern binder: name[^level][: annot]."""

    name: str
    is_type: bool
    level: Optional[int]
    annot: Optional[SAnnot]


# types
@dataclass(frozen=True)
class STInt:
    pass


@dataclass(frozen=True)
class STBool:
    pass


@dataclass(frozen=True)
class STVar:
    name: str
    spans: Optional[tuple] = None  # tuple of token tuples, or None for no `with`


@dataclass(frozen=True)
class STList:
    elem: object


@dataclass(frozen=True)
class STArrow:
    dom: object
    cod: object


@dataclass(frozen=True)
class STForall:
    name: str
    annot: SAnnot  # annot.type is always None (a kind)
    body: object


@dataclass(frozen=True)
class STBoxT:
    ctx: tuple  # tuple[SDecl, ...]
    level: Optional[int]
    body: object


# terms
@dataclass(frozen=True)
class SVar:
    name: str
    spans: Optional[tuple] = None


@dataclass(frozen=True)
class SInt:
    value: int


@dataclass(frozen=True)
class SBool:
    value: bool


@dataclass(frozen=True)
class SNil:
    pass


@dataclass(frozen=True)
class SCons:
    head: object
    tail: object


@dataclass(frozen=True)
class SLam:
    name: str
    ty: object  # surface type or None
    body: object


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object


@dataclass(frozen=True)
class STyApp:
    fn: object
    binders: tuple  # tuple[SBinder, ...], annots absent
    ty: object


@dataclass(frozen=True)
class STFn:
    name: str
    annot: Optional[SAnnot]
    body: object


@dataclass(frozen=True)
class SBoxE:
    binders: tuple
    level: Optional[int]
    body: object


@dataclass(frozen=True)
class SLetBox:
    binders: tuple
    name: str
    bound: object
    body: object


@dataclass(frozen=True)
class SLet:
    name: str
    bound: object
    body: object


@dataclass(frozen=True)
class SBranchS:
    sigs: Optional[tuple]  # tuple[SDecl, ...] or None
    binders: tuple
    pattern: object
    annot: object  # surface type or None
    body: object
    level: Optional[int] = None  # written box^k level on the pattern


@dataclass(frozen=True)
class SCaseE:
    scrut: object
    annot: object  # surface type or None
    branches: tuple


@dataclass(frozen=True)
class SMatchL:
    scrut: object
    nil_body: object
    hname: str
    tname: str
    cons_body: object


@dataclass(frozen=True)
class SIf:
    cond: object
    then: object
    els: object


@dataclass(frozen=True)
class SPrim:
    op: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class SHd:
    arg: object


@dataclass(frozen=True)
class STl:
    arg: object


@dataclass(frozen=True)
class SIsNil:
    arg: object


@dataclass(frozen=True)
class SFixE:
    name: str
    ty: object
    body: object


@dataclass(frozen=True)
class SAsc:
    term: object
    ty: object


@dataclass(frozen=True)
class SDef:
    name: str
    sig: object  # surface type or None
    params: tuple  # tuple[(name, is_type), ...]
    body: object


@dataclass(frozen=True)
class SProgram:
    defs: tuple
    entry: object  # surface term or None


# tokens that end a `with` closure at depth 0 (besides a bare comma,
# which separates entries)
_SPAN_STOP = frozenset(
    {")", "]", "|", ";", "in", "then", "else", "of", "->",
     "=", "<=", "::", "+", "-", "*", "eof"}
)

_OPEN = {"(": ")", "[": "]"}


# ---------------------------------------------------------------------------
# parser


class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0
        # `match e with`: suppress `with`-closure parsing in the scrutinee
        self._no_with = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or t.kind!r}",
                             t.line, t.col)
        return self.next()

    def _fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- lookahead scans ---------------------------------------------------

    def _find_level0(self, wanted, start=None):
        """Index of the first depth-0 token in `wanted`, scanning from
        `start` (default: current position).  Stops without a match at a
        depth-0 closer or eof."""
        depth = 0
        j = self.i if start is None else start
        while True:
            k = self.toks[j].kind
            if k == "eof":
                return None
            if depth == 0:
                if k in wanted:
                    return j
                if k in (")", "]"):
                    return None
            if k in _OPEN:
                depth += 1
            elif k in (")", "]"):
                depth -= 1
            j += 1

    def _group_end(self, start: int) -> int:
        """Index of the closer matching the opener at `start`."""
        depth = 0
        j = start
        while True:
            k = self.toks[j].kind
            if k == "eof":
                t = self.toks[start]
                raise ParseError("unclosed bracket", t.line, t.col)
            if k in _OPEN:
                depth += 1
            elif k in (")", "]"):
                depth -= 1
                if depth == 0:
                    return j
            j += 1

    def _binder_dot(self) -> Optional[int]:
        """Inside a freshly opened group: index of the depth-0 `.` that
        separates binders from the body, or None.  A `.` directly after
        `with` (the empty-closure marker) does not count."""
        depth = 0
        j = self.i
        while True:
            k = self.toks[j].kind
            if k == "eof":
                return None
            if depth == 0:
                if k == ".":
                    if j > 0 and self.toks[j - 1].kind == "with":
                        j += 1
                        continue
                    return j
                if k in (")", "]"):
                    return None
            if k in _OPEN:
                depth += 1
            elif k in (")", "]"):
                depth -= 1
            j += 1

    def _is_type_app(self) -> bool:
        """At `(`: does the group start `(.` or `(names.` (a type argument)?"""
        if not self.at("("):
            return False
        j = self.i + 1
        if self.toks[j].kind == ".":
            return True
        while True:
            k = self.toks[j].kind
            if k not in ("name", "tname"):
                return False
            j += 1
            if self.toks[j].kind == "^":
                if self.toks[j + 1].kind != "int":
                    return False
                j += 2
            k = self.toks[j].kind
            if k == ".":
                return True
            if k != ",":
                return False
            j += 1

    # -- with-closures -----------------------------------------------------

    def _with_spans(self) -> tuple:
        """After `with`: collect the closure entries as raw token spans."""
        if self.at("."):
            self.next()
            return ()
        if self.at("("):
            end = self._group_end(self.i)
            if self._wrapper_group(end):
                return self._split_group(end)
        return self._scan_spans()

    def _wrapper_group(self, end: int) -> bool:
        # a parenthesized group is a wrapper around the whole closure when
        # it has a depth-1 comma but no depth-1 dot (a dot would make it a
        # single `(binders. payload)` entry)
        depth = 0
        has_comma = False
        for j in range(self.i, end + 1):
            k = self.toks[j].kind
            if k in _OPEN:
                depth += 1
            elif k in (")", "]"):
                depth -= 1
            elif depth == 1:
                if k == ",":
                    has_comma = True
                elif k == ".":
                    return False
        return has_comma

    def _split_group(self, end: int) -> tuple:
        self.next()  # (
        spans, cur = [], []
        depth = 0
        while self.i < end:
            t = self.next()
            if t.kind in _OPEN:
                depth += 1
            elif t.kind in (")", "]"):
                depth -= 1
            if depth == 0 and t.kind == ",":
                spans.append(tuple(cur))
                cur = []
            else:
                cur.append(t)
        spans.append(tuple(cur))
        self.next()  # )
        return tuple(spans)

    def _scan_spans(self) -> tuple:
        spans, cur = [], []
        depth = 0
        while True:
            t = self.peek()
            if depth == 0 and t.kind in _SPAN_STOP:
                break
            if depth == 0 and t.kind == ",":
                self.next()
                spans.append(tuple(cur))
                cur = []
                continue
            if t.kind in _OPEN:
                depth += 1
            elif t.kind in (")", "]"):
                depth -= 1
            self.next()
            cur.append(t)
        if not cur:
            self._fail("empty closure entry after `with`")
        spans.append(tuple(cur))
        return tuple(spans)

    # -- binders and declarations -------------------------------------------

    def _binder(self, annots_ok: bool) -> SBinder:
        t = self.peek()
        if t.kind not in ("name", "tname"):
            self._fail("expected a binder name")
        self.next()
        is_type = t.kind == "tname"
        level = None
        if self.at("^"):
            self.next()
            level = int(self.expect("int").text)
        annot = None
        if self.at(":"):
            if not annots_ok:
                self._fail("binder annotations are not allowed here")
            self.next()
            annot = self._annot(star_ok=is_type)
        return SBinder(t.text, is_type, level, annot)

    def _binder_list(self, annots_ok: bool) -> tuple:
        out = [self._binder(annots_ok)]
        while self.at(","):
            self.next()
            out.append(self._binder(annots_ok))
        return tuple(out)

    def _annot(self, star_ok: bool) -> SAnnot:
        """What follows `:` in a declaration: a type, `*`, or
        `(ctx |-^n type-or-*)`."""
        if self.at("*"):
            if not star_ok:
                self._fail("a term declaration cannot have kind *")
            self.next()
            return SAnnot((), 0, None)
        if self.at("(") and self._find_level0({"|-"}, start=self.i + 1) is not None:
            self.next()
            entries = ()
            if not self.at("|-"):
                entries = self._decl_list()
            self.expect("|-")
            level = None
            if self.at("^"):
                self.next()
                level = int(self.expect("int").text)
            if self.at("*"):
                if not star_ok:
                    self._fail("a term declaration cannot have kind *")
                self.next()
                body = None
            else:
                body = self.type_()
            self.expect(")")
            return SAnnot(entries, level, body)
        return SAnnot((), 0, self.type_())

    def _decl(self) -> SDecl:
        t = self.peek()
        if t.kind not in ("name", "tname"):
            self._fail("expected a declaration name")
        self.next()
        self.expect(":")
        annot = self._annot(star_ok=t.kind == "tname")
        return SDecl(t.text, t.kind == "tname", annot)

    def _decl_list(self) -> tuple:
        out = [self._decl()]
        while self.at(","):
            self.next()
            out.append(self._decl())
        return tuple(out)

    # -- types ---------------------------------------------------------------

    def type_(self):
        dom = self._type_post()
        if self.at("->"):
            self.next()
            return STArrow(dom, self.type_())
        return dom

    def _type_post(self):
        t = self._type_atom()
        while self.at("list"):
            self.next()
            t = STList(t)
        return t

    def _type_atom(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return STInt()
        if t.kind == "bool":
            self.next()
            return STBool()
        if t.kind == "tname":
            self.next()
            spans = None
            if self.at("with") and not self._no_with:
                self.next()
                spans = self._with_spans()
            return STVar(t.text, spans)
        if t.kind == "forall":
            self.next()
            name = self.expect("tname").text
            annot = SAnnot((), 0, None)
            if self.at(":"):
                self.next()
                annot = self._annot(star_ok=True)
                if annot.type is not None:
                    self._fail("forall binders have kinds, not types")
            self.expect(".")
            return STForall(name, annot, self.type_())
        if t.kind == "[":
            self.next()
            entries = ()
            level = None
            if self._find_level0({"|-"}) is not None:
                if not self.at("|-"):
                    entries = self._decl_list()
                self.expect("|-")
                if self.at("^"):
                    self.next()
                    level = int(self.expect("int").text)
            body = self.type_()
            self.expect("]")
            return STBoxT(entries, level, body)
        if t.kind == "(":
            nxt = self.peek(1)
            if nxt.kind == "tname" and self.peek(2).kind == ":":
                # ('a : kind) -> T
                self.next()
                name = self.expect("tname").text
                self.expect(":")
                annot = self._annot(star_ok=True)
                if annot.type is not None:
                    self._fail("forall binders have kinds, not types")
                self.expect(")")
                self.expect("->")
                return STForall(name, annot, self.type_())
            if nxt.kind == "name" and self.peek(2).kind == ":":
                # named argument sugar: (l : T) -> S; the name is dropped
                self.next()
                self.next()
                self.next()
                dom = self.type_()
                self.expect(")")
                self.expect("->")
                return STArrow(dom, self.type_())
            self.next()
            inner = self.type_()
            self.expect(")")
            return inner
        self._fail(f"expected a type, found {t.text or t.kind!r}")

    # -- terms ----------------------------------------------------------------

    def term(self):
        t = self.peek()
        if t.kind in ("fn", "fun"):
            self.next()
            params = []
            while not self.at("->"):
                if self.at("("):
                    self.next()
                    name = self.expect("name").text
                    self.expect(":")
                    ty = self.type_()
                    self.expect(")")
                    params.append((name, ty))
                elif self.peek().kind == "name":
                    params.append((self.next().text, None))
                else:
                    self._fail("expected a parameter or `->`")
            self.expect("->")
            body = self.term()
            for name, ty in reversed(params):
                body = SLam(name, ty, body)
            return body
        if t.kind == "tfn":
            self.next()
            params = []
            while not self.at("->"):
                if self.at("("):
                    self.next()
                    name = self.expect("tname").text
                    self.expect(":")
                    annot = self._annot(star_ok=True)
                    if annot.type is not None:
                        self._fail("tfn binders have kinds, not types")
                    self.expect(")")
                    params.append((name, annot))
                elif self.peek().kind == "tname":
                    params.append((self.next().text, None))
                else:
                    self._fail("expected a type parameter or `->`")
            self.expect("->")
            body = self.term()
            for name, annot in reversed(params):
                body = STFn(name, annot, body)
            return body
        if t.kind in ("fix", "rec"):
            self.next()
            self.expect("(")
            name = self.expect("name").text
            self.expect(":")
            ty = self.type_()
            self.expect(")")
            self.expect("->")
            return SFixE(name, ty, self.term())
        if t.kind == "let":
            return self._let()
        if t.kind == "if":
            self.next()
            cond = self.term()
            self.expect("then")
            then = self.term()
            self.expect("else")
            return SIf(cond, then, self.term())
        if t.kind == "case":
            return self._case()
        if t.kind == "match":
            return self._match()
        return self._cmp()

    def _let(self):
        self.next()
        if self.at("box"):
            self.next()
            binders = ()
            if self.at("("):
                self.next()
                if self._binder_dot() is not None:
                    binders = self._binder_list(annots_ok=False)
                    self.expect(".")
                name = self.expect("name").text
                self.expect(")")
            else:
                name = self.expect("name").text
            self.expect("=")
            bound = self.term()
            self.expect("in")
            return SLetBox(binders, name, bound, self.term())
        name = self.expect("name").text
        self.expect("=")
        bound = self.term()
        self.expect("in")
        return SLet(name, bound, self.term())

    def _case(self):
        self.next()
        scrut = self.term()
        annot = None
        if self.at(":"):
            self.next()
            annot = self.type_()
        self.expect("of")
        if self.at("|"):
            self.next()
        branches = [self._branch()]
        while self.at("|"):
            self.next()
            branches.append(self._branch())
        return SCaseE(scrut, annot, tuple(branches))

    def _branch(self) -> SBranchS:
        sigs = None
        if not self.at("box"):
            sigs = self._sig_list()
            self.expect(".")
        self.expect("box")
        level = None
        if self.at("^"):
            self.next()
            level = int(self.expect("int").text)
        self.expect("(")
        binders = ()
        if self._binder_dot() is not None:
            binders = self._binder_list(annots_ok=False)
            self.expect(".")
        pattern = self.term()
        self.expect(")")
        annot = None
        if self.at(":"):
            # an atom, or the `->` of the body would read as an arrow type
            self.next()
            annot = self._type_atom()
        self.expect("->")
        body = self.term()
        return SBranchS(sigs, binders, pattern, annot, body, level)

    def _sig_list(self) -> tuple:
        out = []
        while True:
            t = self.peek()
            if t.kind == "(":
                self.next()
                out.append(self._decl())
                self.expect(")")
            else:
                out.append(self._decl())
            if self.at(","):
                self.next()
                continue
            return tuple(out)

    def _match(self):
        self.next()
        self._no_with += 1
        try:
            scrut = self.term()
        finally:
            self._no_with -= 1
        self.expect("with")
        if self.at("|"):
            self.next()
        self.expect("[")
        self.expect("]")
        self.expect("->")
        nil_body = self.term()
        self.expect("|")
        hname = self.expect("name").text
        self.expect("::")
        tname = self.expect("name").text
        self.expect("->")
        cons_body = self.term()
        return SMatchL(scrut, nil_body, hname, tname, cons_body)

    def _cmp(self):
        e = self._consterm()
        while self.peek().kind in ("=", "<="):
            op = self.next().kind
            e = SPrim(op, e, self._consterm())
        return e

    def _consterm(self):
        e = self._add()
        if self.at("::"):
            self.next()
            return SCons(e, self._consterm())
        return e

    def _add(self):
        e = self._mul()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            e = SPrim(op, e, self._mul())
        return e

    def _mul(self):
        e = self._unary()
        while self.at("*"):
            self.next()
            e = SPrim("*", e, self._unary())
        return e

    def _unary(self):
        t = self.peek()
        if t.kind == "hd":
            self.next()
            return SHd(self._atom())
        if t.kind == "tl":
            self.next()
            return STl(self._atom())
        if t.kind == "isnil":
            self.next()
            return SIsNil(self._atom())
        return self._app()

    _ATOM_START = frozenset({"int", "name", "true", "false", "box", "[", "(",
                             "hd", "tl", "isnil"})

    def _app(self):
        e = self._atom()
        while True:
            k = self.peek().kind
            if k == "(" and self._is_type_app():
                self.next()
                binders = ()
                if not self.at("."):
                    binders = self._binder_list(annots_ok=False)
                self.expect(".")
                ty = self.type_()
                self.expect(")")
                e = STyApp(e, binders, ty)
                continue
            if k in ("hd", "tl", "isnil"):
                e = SApp(e, self._unary())
                continue
            if k in self._ATOM_START:
                e = SApp(e, self._atom())
                continue
            return e

    def _atom(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return SInt(int(t.text))
        if t.kind == "true":
            self.next()
            return SBool(True)
        if t.kind == "false":
            self.next()
            return SBool(False)
        if t.kind == "name":
            self.next()
            spans = None
            if self.at("with") and not self._no_with:
                self.next()
                spans = self._with_spans()
            return SVar(t.text, spans)
        if t.kind == "[":
            self.next()
            self.expect("]")
            return SNil()
        if t.kind == "box":
            self.next()
            level = None
            if self.at("^"):
                self.next()
                level = int(self.expect("int").text)
            self.expect("(")
            binders = ()
            if self._binder_dot() is not None:
                binders = self._binder_list(annots_ok=True)
                self.expect(".")
            body = self.term()
            self.expect(")")
            return SBoxE(binders, level, body)
        if t.kind == "(":
            self.next()
            inner = self.term()
            if self.at(":"):
                self.next()
                ty = self.type_()
                self.expect(")")
                return SAsc(inner, ty)
            self.expect(")")
            return inner
        self._fail(f"expected a term, found {t.text or t.kind!r}")

    # -- programs ----------------------------------------------------------

    def program(self) -> SProgram:
        defs = []
        entry = None
        while not self.at("eof"):
            if entry is not None:
                self._fail("the entry expression must come last")
            item = self._item()
            if isinstance(item, SDef):
                defs.append(item)
            else:
                entry = item
            while self.at(";"):
                self.next()
        # merge signature-only and equation items by name
        merged = {}
        order = []
        for d in defs:
            if d.name not in merged:
                merged[d.name] = d
                order.append(d.name)
                continue
            prev = merged[d.name]
            if d.body is None and prev.body is not None:
                self._fail(f"signature for {d.name!r} after its equation")
            if d.body is not None and prev.body is not None:
                self._fail(f"duplicate equation for {d.name!r}")
            merged[d.name] = SDef(d.name, prev.sig, d.params, d.body)
        out = []
        for name in order:
            d = merged[name]
            if d.body is None:
                self._fail(f"missing equation for {d.name!r}")
            out.append(d)
        return SProgram(tuple(out), entry)

    def _item(self):
        t = self.peek()
        if t.kind == "name":
            # NAME params* `=`  -> equation; NAME `:` -> signature
            j = self.i + 1
            while self.toks[j].kind in ("name", "tname"):
                j += 1
            if self.toks[j].kind == "=" :
                name = self.next().text
                params = []
                while self.peek().kind in ("name", "tname"):
                    p = self.next()
                    params.append((p.text, p.kind == "tname"))
                self.expect("=")
                body = self.term()
                self.expect(";")
                return SDef(name, None, tuple(params), body)
            if self.toks[self.i + 1].kind == ":":
                name = self.next().text
                self.next()
                sig = self.type_()
                self.expect(";")
                return SDef(name, sig, (), None)
        e = self.term()
        if self.at(";"):
            self.next()
        if not self.at("eof"):
            self._fail("only one entry expression is allowed")
        return e


# ---------------------------------------------------------------------------
# entry points

def parse_program(src: str) -> SProgram:
    return Parser(tokenize(src)).program()


def parse_term(src: str):
    p = Parser(tokenize(src))
    e = p.term()
    p.expect("eof")
    return e


def parse_type(src: str):
    p = Parser(tokenize(src))
    t = p.type_()
    p.expect("eof")
    return t


def _span_parser(tokens) -> Parser:
    toks = list(tokens)
    if toks:
        last = toks[-1]
        toks.append(Token("eof", "", last.line, last.col + len(last.text)))
    else:
        toks.append(Token("eof", "", 0, 0))
    return Parser(toks)


def parse_span_term(tokens):
    p = _span_parser(tokens)
    e = p.term()
    p.expect("eof")
    return e


def parse_span_type(tokens):
    p = _span_parser(tokens)
    t = p.type_()
    p.expect("eof")
    return t


def reparse_entry(tokens):
    """Classify one closure-entry span.

    Returns ("name", n) | ("tname", n) | ("closure", binders, payload_tokens)
    | ("payload", tokens).  The payload is parsed later, as a term or a type,
    once the entry's declaration is known.
    """
    toks = tuple(tokens)
    if len(toks) == 1 and toks[0].kind == "name":
        return ("name", toks[0].text)
    if len(toks) == 1 and toks[0].kind == "tname":
        return ("tname", toks[0].text)
    if toks and toks[0].kind == "(" and toks[-1].kind == ")":
        p = _span_parser(toks)
        if p._group_end(0) == len(toks) - 1:
            p.next()
            if p._binder_dot() is not None:
                try:
                    binders = () if p.at(".") else p._binder_list(annots_ok=False)
                    p.expect(".")
                except ParseError:
                    return ("payload", toks)
                payload = tuple(p.toks[p.i : len(toks) - 1])
                return ("closure", binders, payload)
    return ("payload", toks)
