"""First-order formulas over a relational vocabulary, and their text syntax.

Syntax::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | quant | atom
    quant   := ("exists" | "forall") ident ("," ident)* "." formula
    atom    := "true" | "false" | ident "(" ident ("," ident)* ")" | "(" formula ")"

Quantifiers extend as far to the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import UnknownVariable, VocabularyMismatch


class Formula:
    """Base class of formula nodes. Nodes are immutable and hashable."""

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[str, ...]

    def __str__(self):
        return f"{self.name}({','.join(self.args)})"


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self):
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def __str__(self):
        if not self.parts:
            return "true"
        return " & ".join(_wrap(p, And) for p in self.parts)


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def __str__(self):
        if not self.parts:
            return "false"
        return " | ".join(_wrap(p, Or) for p in self.parts)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"exists {self.var}. {self.body}"


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"forall {self.var}. {self.body}"


def _wrap(f, same=None):
    if isinstance(f, (Rel, Const, Not)) or (same is not None and isinstance(f, same)):
        return str(f)
    return f"({f})"


def conj(parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def exists(variables, body) -> Formula:
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


def forall(variables, body) -> Formula:
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: dict[str, None] = {}

    def walk(g, bound):
        if isinstance(g, Rel):
            for a in g.args:
                if a not in bound:
                    out.setdefault(a)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p, bound)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return tuple(out)


def all_vars(f: Formula) -> set[str]:
    if isinstance(f, Rel):
        return set(f.args)
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return set().union(*(all_vars(p) for p in f.parts)) if f.parts else set()
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    return set()


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, (And, Or)):
        return max((quantifier_depth(p) for p in f.parts), default=0)
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_depth(f.body)
    return 0


def is_quantifier_free(f: Formula) -> bool:
    return quantifier_depth(f) == 0


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form; negations only on relation applications."""
    if isinstance(f, Rel):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, And):
        parts = tuple(nnf(p, negate) for p in f.parts)
        return Or(parts) if negate else And(parts)
    if isinstance(f, Or):
        parts = tuple(nnf(p, negate) for p in f.parts)
        return And(parts) if negate else Or(parts)
    if isinstance(f, Exists):
        return Forall(f.var, nnf(f.body, True)) if negate else Exists(f.var, nnf(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, nnf(f.body, True)) if negate else Forall(f.var, nnf(f.body))
    raise TypeError(f"not a formula: {f!r}")


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables; bound variables shadow the mapping."""
    if isinstance(f, Rel):
        return Rel(f.name, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(rename_free(f.body, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_free(p, mapping) for p in f.parts))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    return type(f)(f.var, rename_free(f.body, inner))


def prenex(f: Formula, fresh: Iterator[str]) -> tuple[list[tuple[str, str]], Formula]:
    """Prenex normal form of the NNF of ``f`` with bound variables renamed fresh.

    Returns ``(prefix, matrix)`` where ``prefix`` lists ``("exists"|"forall", var)``
    from outermost to innermost.
    """

    def go(g):
        if isinstance(g, (Rel, Const, Not)):
            return [], g
        if isinstance(g, (And, Or)):
            prefix, parts = [], []
            for p in g.parts:
                pp, m = go(p)
                prefix += pp
                parts.append(m)
            return prefix, type(g)(tuple(parts))
        new = next(fresh)
        pp, m = go(rename_free(g.body, {g.var: new}))
        kind = "exists" if isinstance(g, Exists) else "forall"
        return [(kind, new)] + pp, m

    return go(nnf(f))


def check_vocabulary(f: Formula, vocabulary) -> None:
    """Raise VocabularyMismatch for unknown relations or wrong arities."""
    if isinstance(f, Rel):
        if f.name not in vocabulary:
            raise VocabularyMismatch(f"unknown relation {f.name!r}")
        if vocabulary.arity(f.name) != len(f.args):
            raise VocabularyMismatch(f"{f.name} expects {vocabulary.arity(f.name)} arguments, got {len(f.args)}")
    elif isinstance(f, Not):
        check_vocabulary(f.body, vocabulary)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            check_vocabulary(p, vocabulary)
    elif isinstance(f, (Exists, Forall)):
        check_vocabulary(f.body, vocabulary)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

IDENT = r"[a-zA-Z][a-zA-Z0-9_']*"
_TOKEN = re.compile(rf"\s*(?:(?P<ident>{IDENT})|(?P<sym>[()&|!.,]))")


class FormulaSyntaxError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class _Parser:
    def __init__(self, text, backend=None, allowed=None):
        self.text = text
        self.pos = 0
        self.backend = backend
        self.allowed = allowed
        self.tokens = []
        i = 0
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            if i >= len(text):
                break
            m = _TOKEN.match(text, i)
            if not m:
                raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
            kind = "ident" if m.group("ident") else "sym"
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            i = m.end()
        self.tokens.append(("end", "", len(text)))

    def peek(self):
        return self.tokens[self.pos]

    def take(self, value=None, kind=None):
        tok = self.tokens[self.pos]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            raise FormulaSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        f = self.disj(frozenset())
        if self.peek()[0] != "end":
            tok = self.peek()
            raise FormulaSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def disj(self, bound):
        parts = [self.conj(bound)]
        while self.peek()[1] == "|":
            self.take("|")
            parts.append(self.conj(bound))
        return disj(parts)

    def conj(self, bound):
        parts = [self.unary(bound)]
        while self.peek()[1] == "&":
            self.take("&")
            parts.append(self.unary(bound))
        return conj(parts)

    def unary(self, bound):
        kind, val, off = self.peek()
        if val == "!":
            self.take("!")
            return Not(self.unary(bound))
        if val in ("exists", "forall"):
            self.take()
            names = [self.take(kind="ident")[1]]
            while self.peek()[1] == ",":
                self.take(",")
                names.append(self.take(kind="ident")[1])
            self.take(".")
            body = self.disj(bound | set(names))
            return exists(names, body) if val == "exists" else forall(names, body)
        if val == "(":
            self.take("(")
            f = self.disj(bound)
            self.take(")")
            return f
        if kind == "ident":
            if val in ("true", "false"):
                self.take()
                return Const(val == "true")
            self.take()
            self.take("(")
            args = []
            offsets = []
            while True:
                tok = self.take(kind="ident")
                args.append(tok[1])
                offsets.append(tok[2])
                if self.peek()[1] == ",":
                    self.take(",")
                    continue
                break
            self.take(")")
            for a, o in zip(args, offsets):
                if self.allowed is not None and a not in bound and a not in self.allowed:
                    err = UnknownVariable(f"unknown variable {a!r} at offset {o}")
                    err.offset = o
                    raise err
            return self.relation(val, tuple(args), off)
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", off)

    def relation(self, name, args, off):
        backend = self.backend
        if backend is None:
            return Rel(name, args)
        if name in backend.vocabulary:
            arity = backend.vocabulary.arity(name)
            build = lambda: Rel(name, args)  # noqa: E731
        elif name in backend.derived:
            arity, expand = backend.derived[name]
            build = lambda: expand(*args)  # noqa: E731
        else:
            err = VocabularyMismatch(f"relation {name!r} is not in the vocabulary of {backend.name} atoms (offset {off})")
            err.offset = off
            raise err
        if arity != len(args):
            err = VocabularyMismatch(f"{name} expects {arity} arguments, got {len(args)} (offset {off})")
            err.offset = off
            raise err
        return build()


def parse_formula(text: str, backend=None, variables=None) -> Formula:
    """Parse ``text``; with a backend, check relations and expand derived ones.

    With ``variables``, any free variable outside that collection is an
    UnknownVariable error.
    """
    allowed = None if variables is None else set(variables)
    return _Parser(text, backend, allowed).parse()
