"""Homogeneous atom structures.

A backend packages one countably-infinite homogeneous relational structure:
its vocabulary, a decision procedure for the finite induced substructure
problem (``embeds``), a generator of one-point extensions used by clause
enumeration, and, for some structures, a concrete computable model.

Finite structures handed to ``embeds`` are post-quotient: the ``eq``
relation must be the diagonal, otherwise the structure is rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import CapabilityUnsupported, VocabularyMismatch

Fact = tuple  # (relation name, tuple of element indices)


@dataclass(frozen=True)
class Vocabulary:
    """Relation symbols with arities; ``eq``/2 is always present and first."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate relation names in {names}")
        if not self.relations or self.relations[0] != ("eq", 2):
            raise ValueError("vocabulary must start with eq/2")
        for name, arity in self.relations:
            if arity < 1:
                raise ValueError(f"relation {name} has arity {arity}")

    @classmethod
    def of(cls, **arities: int) -> "Vocabulary":
        return cls((("eq", 2),) + tuple(arities.items()))

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise VocabularyMismatch(f"unknown relation {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def proper(self) -> tuple[tuple[str, int], ...]:
        """All relations except equality."""
        return self.relations[1:]


@dataclass(frozen=True)
class FiniteStructure:
    """A finite structure on elements ``0..size-1``.

    ``facts`` holds ``(relation, tuple)`` pairs, equality included.
    """

    size: int
    facts: frozenset

    @classmethod
    def build(cls, size: int, relations: Mapping[str, Iterable[Sequence[int]]]) -> "FiniteStructure":
        facts = set()
        for rel, tuples in relations.items():
            for t in tuples:
                t = tuple(t)
                if any(not 0 <= e < size for e in t):
                    raise ValueError(f"tuple {t} of {rel} outside 0..{size - 1}")
                facts.add((rel, t))
        return cls(size, frozenset(facts))

    @classmethod
    def discrete(cls, size: int, relations: Mapping[str, Iterable[Sequence[int]]] = None) -> "FiniteStructure":
        """Structure with diagonal ``eq`` plus the given relations."""
        rels = dict(relations or {})
        rels["eq"] = [(i, i) for i in range(size)]
        return cls.build(size, rels)

    def holds(self, rel: str, args: tuple) -> bool:
        return (rel, args) in self.facts

    def relation(self, rel: str) -> frozenset:
        return frozenset(t for r, t in self.facts if r == rel)

    def restrict(self, elements: Sequence[int]) -> "FiniteStructure":
        """Induced substructure on ``elements``, renumbered in the given order."""
        index = {e: i for i, e in enumerate(elements)}
        facts = frozenset(
            (rel, tuple(index[e] for e in t))
            for rel, t in self.facts
            if all(e in index for e in t)
        )
        return FiniteStructure(len(elements), facts)

    def eq_is_diagonal(self) -> bool:
        return self.relation("eq") == {(i, i) for i in range(self.size)}


def _new_tuples(size: int, arity: int) -> list[tuple]:
    """All tuples over ``0..size`` that mention the new element ``size``."""
    return [t for t in itertools.product(range(size + 1), repeat=arity) if size in t]


class AtomBackend:
    """Base class of atom structures.

    Subclasses set ``name`` and ``vocabulary`` and override ``_embeds``.
    Backends with a concrete model set ``has_model`` and implement the
    atom parsing/evaluation hooks.
    """

    name: str = "?"
    vocabulary: Vocabulary = Vocabulary.of()
    has_model = False
    # name -> (arity, expander(args) -> formula); expanded by the formula parser
    derived: Mapping[str, Any] = {}

    def __repr__(self):
        return f"<atoms {self.name}>"

    def __eq__(self, other):
        return isinstance(other, AtomBackend) and other.name == self.name

    def __hash__(self):
        return hash(("atoms", self.name))

    # -- induced substructure problem ------------------------------------

    def check_vocabulary(self, s: FiniteStructure) -> None:
        for rel, t in s.facts:
            if rel not in self.vocabulary:
                raise VocabularyMismatch(f"relation {rel!r} is not in the vocabulary of {self.name}")
            if len(t) != self.vocabulary.arity(rel):
                raise VocabularyMismatch(f"{rel}{t} has the wrong arity")
            if any(not 0 <= e < s.size for e in t):
                raise ValueError(f"{rel}{t} mentions elements outside the structure")

    def embeds(self, s: FiniteStructure) -> bool:
        """Is ``s`` (post-quotient) an induced substructure of the atoms?"""
        self.check_vocabulary(s)
        if not s.eq_is_diagonal():
            return False
        return self._embeds(s)

    def _embeds(self, s: FiniteStructure) -> bool:
        raise NotImplementedError

    # -- one-point extensions --------------------------------------------

    def extensions(self, s: FiniteStructure) -> Iterator[FiniteStructure]:
        """Every embeddable structure on ``s.size + 1`` elements restricting to ``s``.

        ``s`` is assumed embeddable. The default enumerates every truth
        assignment of the new tuples and filters with ``embeds``.
        """
        k = s.size
        base = set(s.facts)
        base.add(("eq", (k, k)))
        slots = [(rel, t) for rel, arity in self.vocabulary.proper for t in _new_tuples(k, arity)]
        for bits in itertools.product((False, True), repeat=len(slots)):
            facts = set(base)
            facts.update(slot for slot, bit in zip(slots, bits) if bit)
            ext = FiniteStructure(k + 1, frozenset(facts))
            if self._embeds(ext):
                yield ext

    # -- concrete model --------------------------------------------------

    def _no_model(self):
        raise CapabilityUnsupported(f"{self.name} atoms have no concrete model")

    def parse_atom(self, text: str):
        self._no_model()

    def format_atom(self, atom) -> str:
        self._no_model()

    def eval_relation(self, rel: str, args: tuple) -> bool:
        self._no_model()

    def witness_candidates(self, values: Sequence) -> list:
        """Finitely many atoms covering every 1-type over ``values``."""
        self._no_model()

    def sample(self) -> list:
        """A small fixed witness sample of distinct atoms."""
        self._no_model()

    def _check_args(self, rel, args):
        arity = self.vocabulary.arity(rel)
        if len(args) != arity:
            raise VocabularyMismatch(f"{rel} expects {arity} arguments, got {len(args)}")


# ---------------------------------------------------------------------------
# Equality
# ---------------------------------------------------------------------------


def _parse_hash_int(text: str) -> int:
    text = text.strip()
    if text.startswith("#"):
        text = text[1:]
    value = int(text)
    if value < 0:
        raise ValueError(f"atom {text!r} must be nonnegative")
    return value


class EqualityAtoms(AtomBackend):
    name = "equality"
    vocabulary = Vocabulary.of()
    has_model = True

    def _embeds(self, s):
        return True

    def extensions(self, s):
        yield FiniteStructure(s.size + 1, s.facts | {("eq", (s.size, s.size))})

    def parse_atom(self, text):
        return _parse_hash_int(text)

    def format_atom(self, atom):
        return f"#{atom}"

    def eval_relation(self, rel, args):
        self._check_args(rel, args)
        return args[0] == args[1]

    def witness_candidates(self, values):
        fresh = max(values, default=-1) + 1
        return sorted(set(values)) + [fresh]

    def sample(self):
        return [0, 1, 2, 3]


# ---------------------------------------------------------------------------
# Total order (Q, <=)
# ---------------------------------------------------------------------------


def _is_partial_order(s: FiniteStructure, rel: str = "le") -> bool:
    n = s.size
    le = s.relation(rel)
    for i in range(n):
        if (i, i) not in le:
            return False
    for i, j in le:
        if i != j and (j, i) in le:
            return False
    for i, j in le:
        for k in range(n):
            if (j, k) in le and (i, k) not in le:
                return False
    return True


def _chain_order(s: FiniteStructure) -> list[int]:
    """Elements of a finite chain from least to greatest."""
    le = s.relation("le")
    below = {e: sum(1 for o in range(s.size) if (o, e) in le) for e in range(s.size)}
    return sorted(range(s.size), key=below.__getitem__)


class TotalOrderAtoms(AtomBackend):
    name = "total_order"
    vocabulary = Vocabulary.of(le=2)
    has_model = True

    def __init__(self):
        from . import formula as fm

        self.derived = {
            "lt": (2, lambda a, b: fm.And((fm.Rel("le", (a, b)), fm.Not(fm.Rel("eq", (a, b)))))),
            "ge": (2, lambda a, b: fm.Rel("le", (b, a))),
            "gt": (2, lambda a, b: fm.And((fm.Rel("le", (b, a)), fm.Not(fm.Rel("eq", (a, b)))))),
        }

    def _embeds(self, s):
        if not _is_partial_order(s):
            return False
        le = s.relation("le")
        return all((i, j) in le or (j, i) in le for i in range(s.size) for j in range(s.size))

    def extensions(self, s):
        order = _chain_order(s)
        k = s.size
        for pos in range(k + 1):
            facts = set(s.facts)
            facts.add(("eq", (k, k)))
            facts.add(("le", (k, k)))
            for e in order[:pos]:
                facts.add(("le", (e, k)))
            for e in order[pos:]:
                facts.add(("le", (k, e)))
            yield FiniteStructure(k + 1, frozenset(facts))

    def parse_atom(self, text):
        value = Fraction(text.strip())
        return value

    def format_atom(self, atom):
        return str(Fraction(atom))

    def eval_relation(self, rel, args):
        self._check_args(rel, args)
        a, b = args
        return a == b if rel == "eq" else a <= b

    def witness_candidates(self, values):
        vals = sorted(set(Fraction(v) for v in values))
        if not vals:
            return [Fraction(0)]
        out = [vals[0] - 1]
        for lo, hi in zip(vals, vals[1:]):
            out += [lo, (lo + hi) / 2]
        out += [vals[-1], vals[-1] + 1]
        return out

    def sample(self):
        return [Fraction(i) for i in range(4)]


# ---------------------------------------------------------------------------
# Equivalence with infinitely many infinite classes
# ---------------------------------------------------------------------------


def _is_equivalence(s: FiniteStructure, rel: str) -> bool:
    r = s.relation(rel)
    n = s.size
    if any((i, i) not in r for i in range(n)):
        return False
    if any((j, i) not in r for i, j in r):
        return False
    return all((i, k) in r for i, j in r for k in range(n) if (j, k) in r)


class EquivalenceAtoms(AtomBackend):
    name = "equivalence"
    vocabulary = Vocabulary.of(R=2)
    has_model = True

    def _embeds(self, s):
        return _is_equivalence(s, "R")

    def extensions(self, s):
        k = s.size
        r = s.relation("R")
        reps = [e for e in range(k) if all((e, o) not in r for o in range(e))]
        base = set(s.facts) | {("eq", (k, k)), ("R", (k, k))}
        for rep in reps + [None]:
            facts = set(base)
            if rep is not None:
                for o in range(k):
                    if (rep, o) in r:
                        facts.add(("R", (o, k)))
                        facts.add(("R", (k, o)))
            yield FiniteStructure(k + 1, frozenset(facts))

    def parse_atom(self, text):
        cls, _, member = text.strip().partition(":")
        if not member:
            raise ValueError(f"equivalence atom {text!r} must look like class:member")
        c, m = int(cls), int(member)
        if c < 0 or m < 0:
            raise ValueError(f"equivalence atom {text!r} must be nonnegative")
        return (c, m)

    def format_atom(self, atom):
        return f"{atom[0]}:{atom[1]}"

    def eval_relation(self, rel, args):
        self._check_args(rel, args)
        a, b = args
        return a == b if rel == "eq" else a[0] == b[0]

    def witness_candidates(self, values):
        vals = sorted(set(values))
        out = list(vals)
        classes = sorted({c for c, _ in vals})
        for c in classes:
            out.append((c, max(m for cc, m in vals if cc == c) + 1))
        out.append((max(classes, default=-1) + 1, 0))
        return out

    def sample(self):
        return [(0, 0), (0, 1), (1, 0), (1, 1)]


# ---------------------------------------------------------------------------
# Universal partial order
# ---------------------------------------------------------------------------


def _down_closed(subset, le, universe):
    return all((o, d) not in le or o in subset for d in subset for o in universe)


def _up_closed(subset, le, universe):
    return all((u, o) not in le or o in subset for u in subset for o in universe)


def _subsets(elements):
    for r in range(len(elements) + 1):
        yield from itertools.combinations(elements, r)


class PartialOrderAtoms(AtomBackend):
    name = "partial_order"
    vocabulary = Vocabulary.of(le=2)

    def _embeds(self, s):
        return _is_partial_order(s)

    def extensions(self, s):
        k = s.size
        le = s.relation("le")
        elems = list(range(k))
        for down in _subsets(elems):
            down = set(down)
            if not _down_closed(down, le, elems):
                continue
            above_all = [o for o in elems if o not in down and all((d, o) in le for d in down)]
            for up in _subsets(above_all):
                up = set(up)
                if not _up_closed(up, le, elems):
                    continue
                facts = set(s.facts) | {("eq", (k, k)), ("le", (k, k))}
                facts.update(("le", (d, k)) for d in down)
                facts.update(("le", (k, u)) for u in up)
                yield FiniteStructure(k + 1, frozenset(facts))


# ---------------------------------------------------------------------------
# Rado graph and universal tournament
# ---------------------------------------------------------------------------


def _bit_edge(i: int, j: int) -> bool:
    if i == j:
        return False
    lo, hi = min(i, j), max(i, j)
    return bool((hi >> lo) & 1)


class GraphAtoms(AtomBackend):
    """The random graph; concrete model is the BIT graph on naturals."""

    name = "graph"
    vocabulary = Vocabulary.of(E=2)
    has_model = True

    def _embeds(self, s):
        e = s.relation("E")
        return all(i != j and (j, i) in e for i, j in e)

    def extensions(self, s):
        k = s.size
        for nbrs in _subsets(range(k)):
            facts = set(s.facts) | {("eq", (k, k))}
            for o in nbrs:
                facts.add(("E", (o, k)))
                facts.add(("E", (k, o)))
            yield FiniteStructure(k + 1, frozenset(facts))

    def parse_atom(self, text):
        return _parse_hash_int(text)

    def format_atom(self, atom):
        return f"#{atom}"

    def eval_relation(self, rel, args):
        self._check_args(rel, args)
        a, b = args
        return a == b if rel == "eq" else _bit_edge(a, b)

    def witness_candidates(self, values):
        vals = sorted(set(values))
        top = 1 << (max(vals, default=0) + 1)
        out = list(vals)
        for nbrs in _subsets(vals):
            out.append(top + sum(1 << v for v in nbrs))
        return out

    def sample(self):
        return [0, 1, 2, 3, 4, 5]


class TournamentAtoms(AtomBackend):
    name = "tournament"
    vocabulary = Vocabulary.of(E=2)

    def _embeds(self, s):
        e = s.relation("E")
        if any(i == j for i, j in e):
            return False
        n = s.size
        return all(((i, j) in e) != ((j, i) in e) for i in range(n) for j in range(i + 1, n))

    def extensions(self, s):
        k = s.size
        for outs in _subsets(range(k)):
            outs = set(outs)
            facts = set(s.facts) | {("eq", (k, k))}
            for o in range(k):
                facts.add(("E", (k, o)) if o in outs else ("E", (o, k)))
            yield FiniteStructure(k + 1, frozenset(facts))


# ---------------------------------------------------------------------------
# Betweenness and cyclic order, decided by searching realizing orders
# ---------------------------------------------------------------------------


def _betweenness_of(order: Sequence[int]) -> set:
    pos = {e: i for i, e in enumerate(order)}
    out = set()
    for x, y, z in itertools.permutations(order, 3):
        if pos[y] < pos[x] < pos[z] or pos[z] < pos[x] < pos[y]:
            out.add((x, y, z))
    return out


def _cyclic_of(order: Sequence[int]) -> set:
    pos = {e: i for i, e in enumerate(order)}
    out = set()
    for x, y, z in itertools.permutations(order, 3):
        a, b, c = pos[x], pos[y], pos[z]
        if a < b < c or c < a < b or b < c < a:
            out.add((x, y, z))
    return out


def _realizing_orders(s: FiniteStructure, rel: str, induced) -> list[list[int]]:
    """All linear arrangements of the elements whose induced relation is ``rel``.

    Exhaustive search that inserts elements one at a time and prunes as soon
    as the partial arrangement disagrees with ``s`` on the placed elements.
    """
    target = s.relation(rel)
    found = []

    def agrees(order):
        placed = set(order)
        sub = {t for t in target if all(e in placed for e in t)}
        return induced(order) == sub

    def rec(order, nxt):
        if nxt == s.size:
            found.append(list(order))
            return
        for pos in range(len(order) + 1):
            cand = order[:pos] + [nxt] + order[pos:]
            if agrees(cand):
                rec(cand, nxt + 1)

    rec([], 0)
    return found


class _OrderShadowAtoms(AtomBackend):
    """Reducts of (Q, <) to one ternary relation (betweenness, cyclic)."""

    rel = "?"

    def _induced(self, order):
        raise NotImplementedError

    def _embeds(self, s):
        return bool(_realizing_orders(s, self.rel, self._induced))

    def extensions(self, s):
        k = s.size
        seen = set()
        for order in _realizing_orders(s, self.rel, self._induced):
            for pos in range(len(order) + 1):
                cand = order[:pos] + [k] + order[pos:]
                facts = {f for f in s.facts if f[0] != self.rel}
                facts.add(("eq", (k, k)))
                facts.update((self.rel, t) for t in self._induced(cand))
                ext = FiniteStructure(k + 1, frozenset(facts))
                if ext not in seen:
                    seen.add(ext)
                    yield ext


class BetweennessAtoms(_OrderShadowAtoms):
    name = "betweenness"
    vocabulary = Vocabulary.of(B=3)
    rel = "B"

    def _induced(self, order):
        return _betweenness_of(order)


class CyclicAtoms(_OrderShadowAtoms):
    name = "cyclic"
    vocabulary = Vocabulary.of(K=3)
    rel = "K"

    def _induced(self, order):
        return _cyclic_of(order)


# ---------------------------------------------------------------------------
# Wreath product
# ---------------------------------------------------------------------------


def _restricted_growth(n: int) -> Iterator[list[int]]:
    """Set partitions of ``range(n)`` as restricted growth strings."""

    def rec(prefix, blocks):
        if len(prefix) == n:
            yield list(prefix)
            return
        for b in range(blocks + 1):
            prefix.append(b)
            yield from rec(prefix, max(blocks, b + 1))
            prefix.pop()

    yield from rec([], 0)


class WreathAtoms(AtomBackend):
    """``A ⊗ B``: every atom of A replaced by a disjoint copy of B.

    Vocabulary: ``eq``, every relation ``r`` of A as ``r_a`` (so ``eq_a`` is
    "same block"), every non-equality relation ``s`` of B as ``s_b``. B's own
    equality coincides with ``eq`` and is not duplicated.
    """

    def __init__(self, a: AtomBackend, b: AtomBackend):
        self.a = a
        self.b = b
        self.name = f"wreath({a.name},{b.name})"
        rels = [("eq", 2)]
        rels += [(f"{r}_a", k) for r, k in a.vocabulary.relations]
        rels += [(f"{r}_b", k) for r, k in b.vocabulary.proper]
        self.vocabulary = Vocabulary(tuple(rels))
        self.has_model = a.has_model and b.has_model

    # -- embedding via partition search ----------------------------------

    def _split(self, s):
        a_facts = {(r[:-2], t) for r, t in s.facts if r.endswith("_a") and r[:-2] in self.a.vocabulary}
        b_facts = {(r[:-2], t) for r, t in s.facts if r.endswith("_b") and r[:-2] in self.b.vocabulary}
        return a_facts, b_facts

    def _embeds(self, s):
        return wreath_partition(self.a, self.b, s) is not None

    def extensions(self, s):
        a_facts, b_facts = self._split(s)
        k = s.size
        block_of = {}
        blocks = []
        for e in range(k):
            for bi, blk in enumerate(blocks):
                if ("eq", (blk[0], e)) in a_facts:
                    block_of[e] = bi
                    blk.append(e)
                    break
            else:
                block_of[e] = len(blocks)
                blocks.append([e])
        quotient = FiniteStructure(
            len(blocks),
            frozenset((r, tuple(block_of[e] for e in t)) for r, t in a_facts),
        )
        seen = set()
        eq_facts = {f for f in s.facts if f[0] == "eq"} | {("eq", (k, k))}

        def assemble(new_block, a_struct, b_ext, members):
            facts = set(s.facts) | eq_facts
            blk_of = dict(block_of)
            blk_of[k] = new_block
            for rel, arity in self.a.vocabulary.relations:
                for t in _new_tuples(k, arity):
                    if a_struct.holds(rel, tuple(blk_of[e] for e in t)):
                        facts.add((f"{rel}_a", t))
            local = {e: i for i, e in enumerate(members + [k])}
            for rel, arity in self.b.vocabulary.proper:
                for t in _new_tuples(k, arity):
                    if all(e in local for e in t) and b_ext.holds(rel, tuple(local[e] for e in t)):
                        facts.add((f"{rel}_b", t))
            return FiniteStructure(k + 1, frozenset(facts))

        def block_structure(members):
            loc = {e: i for i, e in enumerate(members)}
            facts = {(r, tuple(loc[e] for e in t)) for r, t in b_facts if all(e in loc for e in t)}
            facts |= {("eq", (i, i)) for i in range(len(members))}
            return FiniteStructure(len(members), frozenset(facts))

        for bi, members in enumerate(blocks):
            for b_ext in self.b.extensions(block_structure(members)):
                ext = assemble(bi, quotient, b_ext, members)
                if ext not in seen:
                    seen.add(ext)
                    yield ext
        empty_b = FiniteStructure(0, frozenset())
        for a_ext in self.a.extensions(quotient):
            for b_ext in self.b.extensions(empty_b):
                ext = assemble(len(blocks), a_ext, b_ext, [])
                if ext not in seen:
                    seen.add(ext)
                    yield ext

    # -- concrete model --------------------------------------------------

    def parse_atom(self, text):
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError(f"wreath atom {text!r} must look like (a|b)")
        inner = text[1:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "|" and depth == 0:
                return (self.a.parse_atom(inner[:i]), self.b.parse_atom(inner[i + 1:]))
        raise ValueError(f"wreath atom {text!r} must look like (a|b)")

    def format_atom(self, atom):
        return f"({self.a.format_atom(atom[0])}|{self.b.format_atom(atom[1])})"

    def eval_relation(self, rel, args):
        if not self.has_model:
            self._no_model()
        self._check_args(rel, args)
        if rel == "eq":
            return self.a.eval_relation("eq", (args[0][0], args[1][0])) and self.b.eval_relation(
                "eq", (args[0][1], args[1][1])
            )
        base, side = rel[:-2], rel[-1]
        firsts = tuple(x[0] for x in args)
        if side == "a":
            return self.a.eval_relation(base, firsts)
        same_block = all(self.a.eval_relation("eq", (firsts[0], f)) for f in firsts[1:])
        return same_block and self.b.eval_relation(base, tuple(x[1] for x in args))

    def witness_candidates(self, values):
        out = list(dict.fromkeys(values))
        for a in self.a.witness_candidates([v[0] for v in values]):
            inside = [v[1] for v in values if self.a.eval_relation("eq", (v[0], a))]
            for b in self.b.witness_candidates(inside):
                cand = (a, b)
                if cand not in out:
                    out.append(cand)
        return out

    def sample(self):
        sa, sb = self.a.sample()[:2], self.b.sample()[:2]
        return [(a, b) for a in sa for b in sb]


def wreath_partition(a: AtomBackend, b: AtomBackend, s: FiniteStructure):
    """Search a block partition witnessing that ``s`` embeds into ``a ⊗ b``.

    Returns the partition (list of block ids per element) or None. The
    structure must be over the wreath vocabulary with diagonal ``eq``.
    """
    a_facts = {}
    b_rels = {}
    for r, t in s.facts:
        if r.endswith("_a") and r[:-2] in a.vocabulary:
            a_facts[(r[:-2], t)] = True
        elif r.endswith("_b") and r[:-2] in b.vocabulary:
            b_rels.setdefault(r[:-2], set()).add(t)
    n = s.size

    def consistent(assign):
        """Pruning: B-tuples stay inside blocks, A-truth is uniform on blocks."""
        m = len(assign)
        last = m - 1
        for rel, tuples in b_rels.items():
            for t in tuples:
                if last in t and all(e < m for e in t):
                    if len({assign[e] for e in t}) != 1:
                        return False
        return uniform(assign) is not None

    def uniform(assign):
        seen = {}
        for rel, arity in a.vocabulary.relations:
            for t in itertools.product(range(len(assign)), repeat=arity):
                key = (rel, tuple(assign[e] for e in t))
                val = (rel, t) in a_facts
                if seen.setdefault(key, val) != val:
                    return None
        return seen

    def rec(assign, blocks):
        if len(assign) == n:
            truth = uniform(assign)
            if truth is None:
                return None
            quotient = FiniteStructure(blocks, frozenset(key for key, v in truth.items() if v))
            if not a.embeds(quotient):
                return None
            for blk in range(blocks):
                members = [e for e in range(n) if assign[e] == blk]
                loc = {e: i for i, e in enumerate(members)}
                facts = {("eq", (i, i)) for i in range(len(members))}
                for rel, tuples in b_rels.items():
                    facts |= {(rel, tuple(loc[e] for e in t)) for t in tuples if all(e in loc for e in t)}
                if not b.embeds(FiniteStructure(len(members), frozenset(facts))):
                    return None
            return list(assign)
        for blk in range(blocks + 1):
            assign.append(blk)
            if consistent(assign):
                res = rec(assign, max(blocks, blk + 1))
                if res is not None:
                    return res
            assign.pop()
        return None

    return rec([], 0)


# ---------------------------------------------------------------------------
# Registry and spec-level operations
# ---------------------------------------------------------------------------

EQUALITY = EqualityAtoms()
TOTAL_ORDER = TotalOrderAtoms()
EQUIVALENCE = EquivalenceAtoms()
PARTIAL_ORDER = PartialOrderAtoms()
GRAPH = GraphAtoms()
TOURNAMENT = TournamentAtoms()
BETWEENNESS = BetweennessAtoms()
CYCLIC = CyclicAtoms()

_SIMPLE = {
    b.name: b
    for b in (EQUALITY, TOTAL_ORDER, EQUIVALENCE, PARTIAL_ORDER, GRAPH, TOURNAMENT, BETWEENNESS, CYCLIC)
}

BACKEND_NAMES = tuple(_SIMPLE) + ("wreath(<a>,<b>)",)


@lru_cache(maxsize=None)
def get_backend(name: str) -> AtomBackend:
    """Look up a backend by name; ``wreath(a,b)`` nests."""
    name = name.replace(" ", "")
    if name in _SIMPLE:
        return _SIMPLE[name]
    if name.startswith("wreath(") and name.endswith(")"):
        inner = name[len("wreath("):-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return WreathAtoms(get_backend(inner[:i]), get_backend(inner[i + 1:]))
    raise ValueError(f"unknown atoms {name!r}; expected one of {', '.join(BACKEND_NAMES)}")


def _checked(backend: AtomBackend, s: FiniteStructure) -> bool:
    return backend.embeds(s)


def embeds_equality(s: FiniteStructure) -> bool:
    return _checked(EQUALITY, s)


def embeds_total_order(s: FiniteStructure) -> bool:
    return _checked(TOTAL_ORDER, s)


def embeds_equivalence(s: FiniteStructure) -> bool:
    return _checked(EQUIVALENCE, s)


def embeds_partial_order(s: FiniteStructure) -> bool:
    return _checked(PARTIAL_ORDER, s)


def embeds_graph(s: FiniteStructure) -> bool:
    return _checked(GRAPH, s)


def embeds_tournament(s: FiniteStructure) -> bool:
    return _checked(TOURNAMENT, s)


def embeds_betweenness(s: FiniteStructure) -> bool:
    return _checked(BETWEENNESS, s)


def embeds_cyclic(s: FiniteStructure) -> bool:
    return _checked(CYCLIC, s)


def wreath_embeds(a: AtomBackend, b: AtomBackend, s: FiniteStructure) -> bool:
    return WreathAtoms(a, b).embeds(s)


def eval_relation(backend: AtomBackend, rel: str, args: tuple) -> bool:
    if not backend.has_model:
        raise CapabilityUnsupported(f"{backend.name} atoms have no concrete model")
    return backend.eval_relation(rel, tuple(args))


@lru_cache(maxsize=200_000)
def cached_extensions(backend: AtomBackend, s: FiniteStructure) -> tuple[FiniteStructure, ...]:
    return tuple(backend.extensions(s))
