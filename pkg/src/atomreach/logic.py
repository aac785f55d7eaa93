"""Complete clauses, legal disjunctive normal form, and quantifier elimination.

A complete consistent clause over n variables is stored canonically as

* ``classes``: the element each variable denotes, numbered by first
  occurrence (so the equality literals are implicit), and
* ``facts``: the sorted non-equality positive facts over those elements.

Negative literals are implicit: the clause is complete. Two clauses are
equal iff they contain the same literals, so an :class:`Ldnf` is just a
variable list plus a frozenset of clauses and equality of ldnfs is
syntactic. Clause enumeration grows structures one element at a time via
the backend's one-point extensions, so only legal clauses are ever built.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from . import formula as fm
from .atoms import AtomBackend, FiniteStructure, cached_extensions
from .errors import (
    InconsistentClause,
    MalformedClause,
    UnknownVariable,
    VariableMismatch,
    VocabularyMismatch,
    WidthExceeded,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_WIDTH = 8
AMALGAM_CACHE = 200_000


@dataclass(frozen=True, order=True)
class Literal:
    rel: str
    args: tuple[str, ...]
    positive: bool = True

    def __neg__(self):
        return Literal(self.rel, self.args, not self.positive)

    def __str__(self):
        text = f"{self.rel}({','.join(self.args)})"
        return text if self.positive else f"!{text}"


@dataclass(frozen=True, order=True)
class Clause:
    """Canonical complete consistent clause (positional variables)."""

    classes: tuple[int, ...]
    facts: tuple[tuple[str, tuple[int, ...]], ...] = ()

    @property
    def width(self) -> int:
        return len(self.classes)

    @property
    def size(self) -> int:
        return max(self.classes) + 1 if self.classes else 0

    @classmethod
    def from_structure(cls, classes: Sequence[int], s: FiniteStructure) -> "Clause":
        """Clause of the variables ``classes`` mapped into ``s`` (canonicalized)."""
        renum: dict[int, int] = {}
        for e in classes:
            renum.setdefault(e, len(renum))
        facts = sorted(
            (rel, tuple(renum[e] for e in t))
            for rel, t in s.facts
            if rel != "eq" and all(e in renum for e in t)
        )
        return cls(tuple(renum[e] for e in classes), tuple(facts))

    def structure(self) -> FiniteStructure:
        n = self.size
        return FiniteStructure(n, frozenset(self.facts) | {("eq", (i, i)) for i in range(n)})

    def project(self, positions: Sequence[int]) -> "Clause":
        """Clause over the variables at ``positions`` (repeats allowed)."""
        classes = [self.classes[p] for p in positions]
        renum: dict[int, int] = {}
        for e in classes:
            renum.setdefault(e, len(renum))
        facts = sorted(
            (rel, tuple(renum[e] for e in t)) for rel, t in self.facts if all(e in renum for e in t)
        )
        return Clause(tuple(renum[e] for e in classes), tuple(facts))

    def holds(self, rel: str, positions: Sequence[int]) -> bool:
        elems = tuple(self.classes[p] for p in positions)
        if rel == "eq":
            return elems[0] == elems[1]
        return (rel, elems) in self._factset

    @property
    def _factset(self) -> frozenset:
        fs = self.__dict__.get("_fs")
        if fs is None:
            fs = frozenset(self.facts)
            object.__setattr__(self, "_fs", fs)
        return fs

    def literals(self, vocabulary, names: Sequence[str]) -> list[Literal]:
        """Every literal of the clause over ``names``, sorted canonically."""
        out = []
        for rel, arity in vocabulary.relations:
            for pos in itertools.product(range(len(names)), repeat=arity):
                out.append(Literal(rel, tuple(names[p] for p in pos), self.holds(rel, pos)))
        return out

    def _equality_parts(self, names: Sequence[str]):
        """Equality literals of a compact rendering, plus the class representatives."""
        rep: dict[int, str] = {}
        parts: list[fm.Formula] = []
        for name, e in zip(names, self.classes):
            if e in rep:
                parts.append(fm.Rel("eq", (rep[e], name)))
            else:
                rep[e] = name
        reps = [rep[e] for e in range(self.size)]
        for i, j in itertools.combinations(range(len(reps)), 2):
            parts.append(fm.Not(fm.Rel("eq", (reps[i], reps[j]))))
        return parts, reps

    def describe(self, vocabulary, names: Sequence[str]) -> str:
        return " & ".join(str(f) for f in clause_formula(self, vocabulary, names).parts) or "true"


def clause_formula(c: Clause, vocabulary, names: Sequence[str]) -> fm.Formula:
    """Formula equivalent to ``c`` listing literals between representatives only."""
    parts, reps = c._equality_parts(names)
    for rel, arity in vocabulary.proper:
        for t in itertools.product(range(len(reps)), repeat=arity):
            atom = fm.Rel(rel, tuple(reps[e] for e in t))
            parts.append(atom if (rel, t) in c._factset else fm.Not(atom))
    return fm.And(tuple(parts))


@dataclass(frozen=True)
class Ldnf:
    """A set of pairwise distinct legal complete clauses over one variable list."""

    variables: tuple[str, ...]
    clauses: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise VariableMismatch(f"repeated variables in {self.variables}")
        object.__setattr__(self, "clauses", frozenset(self.clauses))
        for c in self.clauses:
            if c.width != len(self.variables):
                raise MalformedClause(f"clause of width {c.width} in an ldnf over {self.variables}")

    @property
    def width(self) -> int:
        return len(self.variables)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(sorted(self.clauses))

    def is_empty(self) -> bool:
        return not self.clauses

    def sorted_clauses(self) -> list[Clause]:
        return sorted(self.clauses)

    def rename(self, names: Sequence[str]) -> "Ldnf":
        """Same clauses, positional variables renamed."""
        names = tuple(names)
        if len(names) != len(self.variables):
            raise VariableMismatch(f"cannot rename {self.variables} to {names}")
        return Ldnf(names, self.clauses)

    def reorder(self, order: Sequence[str]) -> "Ldnf":
        order = tuple(order)
        if sorted(order) != sorted(self.variables):
            raise VariableMismatch(f"{order} is not a permutation of {self.variables}")
        if order == self.variables:
            return self
        pos = [self.variables.index(v) for v in order]
        return Ldnf(order, frozenset(c.project(pos) for c in self.clauses))

    def restrict(self, keep: Sequence[str]) -> "Ldnf":
        """Existential projection onto ``keep`` (drop literals of the other variables)."""
        for v in keep:
            if v not in self.variables:
                raise UnknownVariable(f"{v!r} is not among {self.variables}")
        pos = [self.variables.index(v) for v in keep]
        return Ldnf(tuple(keep), frozenset(c.project(pos) for c in self.clauses))

    def substitute(self, mapping: dict) -> "Ldnf":
        """Rename variables, possibly identifying several of them.

        Clauses in which identified variables denote different elements are
        dropped. The new variable list follows first occurrence.
        """
        targets = [mapping.get(v, v) for v in self.variables]
        new_vars = tuple(dict.fromkeys(targets))
        first = [targets.index(t) for t in new_vars]
        groups = [[i for i, t in enumerate(targets) if t == nv] for nv in new_vars]
        out = set()
        for c in self.clauses:
            if all(len({c.classes[i] for i in g}) == 1 for g in groups):
                out.add(c.project(first))
        return Ldnf(new_vars, frozenset(out))

    def union(self, other: "Ldnf") -> "Ldnf":
        other = _aligned(self, other)
        return Ldnf(self.variables, self.clauses | other.clauses)

    def intersection(self, other: "Ldnf") -> "Ldnf":
        other = _aligned(self, other)
        return Ldnf(self.variables, self.clauses & other.clauses)

    def entails(self, other: "Ldnf") -> bool:
        other = _aligned(self, other)
        return self.clauses <= other.clauses

    def difference(self, other: "Ldnf") -> "Ldnf":
        other = _aligned(self, other)
        return Ldnf(self.variables, self.clauses - other.clauses)

    def __or__(self, other):
        return self.union(other)

    def __le__(self, other):
        return self.entails(other)

    def to_formula(self, vocabulary) -> fm.Formula:
        clauses = self.sorted_clauses()
        if not clauses:
            return fm.FALSE
        return fm.disj(clause_formula(c, vocabulary, self.variables) for c in clauses)

    def describe(self, vocabulary) -> list[str]:
        return [c.describe(vocabulary, self.variables) for c in self.sorted_clauses()]


def _aligned(a: Ldnf, b: Ldnf) -> Ldnf:
    if a.variables == b.variables:
        return b
    if sorted(a.variables) == sorted(b.variables):
        return b.reorder(a.variables)
    raise VariableMismatch(f"ldnfs over {a.variables} and {b.variables}")


def ldnf_true(variables: Sequence[str] = ()) -> Ldnf:
    """Valid only for width 0; wider "true" needs a backend, see Theory.top."""
    if variables:
        raise ValueError("use Theory.top for positive width")
    return Ldnf((), frozenset({Clause(())}))


def ldnf_false(variables: Sequence[str] = ()) -> Ldnf:
    return Ldnf(tuple(variables), frozenset())


def ldnf_union(a: Ldnf, b: Ldnf) -> Ldnf:
    if a.variables != b.variables:
        raise VariableMismatch(f"ldnfs over {a.variables} and {b.variables}")
    return a.union(b)


def ldnf_entails(a: Ldnf, b: Ldnf) -> bool:
    if a.variables != b.variables:
        raise VariableMismatch(f"ldnfs over {a.variables} and {b.variables}")
    return a.entails(b)


# ---------------------------------------------------------------------------
# Raw literal sets: completeness, consistency, induced structure
# ---------------------------------------------------------------------------


def _literal_table(vocabulary, variables, literals):
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    table: dict[tuple, bool] = {}
    for lit in literals:
        if lit.rel not in vocabulary:
            raise VocabularyMismatch(f"unknown relation {lit.rel!r}")
        if len(lit.args) != vocabulary.arity(lit.rel):
            raise MalformedClause(f"{lit} has the wrong arity")
        for a in lit.args:
            if a not in index:
                raise MalformedClause(f"{lit} mentions {a!r}, not a clause variable")
        key = (lit.rel, tuple(index[a] for a in lit.args))
        if table.get(key, lit.positive) != lit.positive:
            raise MalformedClause(f"both {lit} and its negation appear")
        table[key] = lit.positive
    for rel, arity in vocabulary.relations:
        for t in itertools.product(range(len(variables)), repeat=arity):
            if (rel, t) not in table:
                missing = Literal(rel, tuple(variables[i] for i in t))
                raise MalformedClause(f"clause is not complete: {missing} undecided")
    return table


def clause_consistent(vocabulary, variables: Sequence[str], literals: Iterable[Literal]) -> bool:
    """Equality literals form an equivalence and all literals respect it."""
    table = _literal_table(vocabulary, variables, literals)
    return _consistent_table(vocabulary, len(tuple(variables)), table)


def _consistent_table(vocabulary, n, table) -> bool:
    eq = lambda i, j: table[("eq", (i, j))]  # noqa: E731
    for i in range(n):
        if not eq(i, i):
            return False
    for i, j in itertools.product(range(n), repeat=2):
        if eq(i, j) and not eq(j, i):
            return False
    for i, j, k in itertools.product(range(n), repeat=3):
        if eq(i, j) and eq(j, k) and not eq(i, k):
            return False
    for (rel, t), val in table.items():
        for pos, a in enumerate(t):
            for b in range(n):
                if eq(a, b):
                    u = t[:pos] + (b,) + t[pos + 1:]
                    if table[(rel, u)] != val:
                        return False
    return True


def clause_from_literals(vocabulary, variables: Sequence[str], literals: Iterable[Literal]) -> Clause:
    """Canonical clause from a complete consistent literal set."""
    variables = tuple(variables)
    table = _literal_table(vocabulary, variables, literals)
    if not _consistent_table(vocabulary, len(variables), table):
        raise InconsistentClause("equality literals do not induce a congruence")
    classes: list[int] = []
    reps: list[int] = []
    for i in range(len(variables)):
        for e, r in enumerate(reps):
            if table[("eq", (r, i))]:
                classes.append(e)
                break
        else:
            classes.append(len(reps))
            reps.append(i)
    facts = []
    for rel, arity in vocabulary.proper:
        for t in itertools.product(range(len(reps)), repeat=arity):
            if table[(rel, tuple(reps[e] for e in t))]:
                facts.append((rel, t))
    return Clause(tuple(classes), tuple(sorted(facts)))


def clause_to_structure(c: Clause) -> FiniteStructure:
    return c.structure()


# ---------------------------------------------------------------------------
# Theory: normalization against one backend under a width budget
# ---------------------------------------------------------------------------


class Theory:
    """All ldnf operations that need the atoms: enumeration, conjunction,
    complement, quantifier elimination, formula normalization."""

    def __init__(self, backend: AtomBackend, max_width: int = DEFAULT_MAX_WIDTH):
        self.backend = backend
        self.vocabulary = backend.vocabulary
        self.max_width = max_width
        self._legal: dict[int, tuple[Clause, ...]] = {}
        self._render_cache: dict[Clause, tuple] = {}
        self._amalgams: dict[tuple, tuple[Clause, ...]] = {}
        self._fresh = itertools.count()

    def __repr__(self):
        return f"Theory({self.backend.name}, max_width={self.max_width})"

    # -- budget ----------------------------------------------------------

    def check_width(self, n: int, what: str = "formula") -> None:
        if n > self.max_width:
            raise WidthExceeded(n, self.max_width, what)

    def fresh(self, prefix: str = "_t") -> str:
        return f"{prefix}{next(self._fresh)}"

    # -- clauses ---------------------------------------------------------

    def is_legal(self, c: Clause) -> bool:
        return self.backend.embeds(c.structure())

    def extensions(self, s: FiniteStructure) -> tuple[FiniteStructure, ...]:
        return cached_extensions(self.backend, s)

    def extend_clause(self, c: Clause, count: int) -> Iterator[Clause]:
        """Every legal clause over ``width + count`` variables restricting to ``c``."""
        base = c.structure()

        def rec(classes, s, remaining):
            if remaining == 0:
                yield Clause.from_structure(classes, s)
                return
            for e in range(s.size):
                yield from rec(classes + (e,), s, remaining - 1)
            for ext in self.extensions(s):
                yield from rec(classes + (s.size,), ext, remaining - 1)

        yield from rec(c.classes, base, count)

    def legal_clauses(self, n: int) -> tuple[Clause, ...]:
        """All legal complete clauses over ``n`` positional variables."""
        self.check_width(n, "clause enumeration")
        if n not in self._legal:
            self._legal[n] = tuple(sorted(set(self.extend_clause(Clause(()), n))))
        return self._legal[n]

    def legal_clauses_naive(self, n: int) -> tuple[Clause, ...]:
        """Reference enumeration: every equality partition, every truth
        assignment on class tuples, filtered by the embedding test."""
        self.check_width(n, "clause enumeration")
        out = []
        for classes in _partitions(n):
            size = max(classes, default=-1) + 1
            slots = [
                (rel, t) for rel, arity in self.vocabulary.proper for t in itertools.product(range(size), repeat=arity)
            ]
            for bits in itertools.product((False, True), repeat=len(slots)):
                c = Clause(tuple(classes), tuple(sorted(s for s, b in zip(slots, bits) if b)))
                if self.is_legal(c):
                    out.append(c)
        return tuple(sorted(out))

    def top(self, variables: Sequence[str]) -> Ldnf:
        variables = tuple(variables)
        return Ldnf(variables, frozenset(self.legal_clauses(len(variables))))

    def clause_of(self, atoms: Sequence) -> Clause:
        """The complete clause realized by concrete atoms."""
        b = self.backend
        if not b.has_model:
            b._no_model()
        reps: list = []
        classes = []
        for a in atoms:
            for e, r in enumerate(reps):
                if b.eval_relation("eq", (r, a)):
                    classes.append(e)
                    break
            else:
                classes.append(len(reps))
                reps.append(a)
        facts = []
        for rel, arity in self.vocabulary.proper:
            for t in itertools.product(range(len(reps)), repeat=arity):
                if b.eval_relation(rel, tuple(reps[e] for e in t)):
                    facts.append((rel, t))
        return Clause(tuple(classes), tuple(sorted(facts)))

    # -- ldnf algebra ----------------------------------------------------

    def extend(self, d: Ldnf, new_vars: Sequence[str]) -> Ldnf:
        """Cylindrify ``d`` with unconstrained fresh variables appended."""
        new_vars = tuple(v for v in new_vars if v not in d.variables)
        if not new_vars:
            return d
        variables = d.variables + new_vars
        self.check_width(len(variables))
        out = set()
        for c in d.clauses:
            out.update(self.extend_clause(c, len(new_vars)))
        return Ldnf(variables, frozenset(out))

    def align(self, d: Ldnf, variables: Sequence[str]) -> Ldnf:
        """``d`` over exactly ``variables`` (a superset of its own)."""
        variables = tuple(variables)
        for v in d.variables:
            if v not in variables:
                raise UnknownVariable(f"{v!r} is not among {variables}")
        return self.extend(d, [v for v in variables if v not in d.variables]).reorder(variables)

    def conjoin(self, a: Ldnf, b: Ldnf) -> Ldnf:
        """Conjunction, over ``a.variables`` followed by b's new variables."""
        shared = [v for v in a.variables if v in b.variables]
        b_only = [v for v in b.variables if v not in a.variables]
        variables = a.variables + tuple(b_only)
        self.check_width(len(variables))
        if not a.clauses or not b.clauses:
            return Ldnf(variables, frozenset())
        pos_a = [a.variables.index(v) for v in shared]
        pos_b = [b.variables.index(v) for v in shared]
        only_b = [b.variables.index(v) for v in b_only]
        groups: dict[Clause, list[Clause]] = {}
        for c in b.clauses:
            groups.setdefault(c.project(pos_b), []).append(c)
        out = set()
        shape = (tuple(pos_a), tuple(pos_b), tuple(only_b))
        for c1 in a.clauses:
            for c2 in groups.get(c1.project(pos_a), ()):
                # at a fixed width only finitely many joins exist, and they recur
                key = (c1, c2, shape)
                hit = self._amalgams.get(key)
                if hit is None:
                    if len(self._amalgams) > AMALGAM_CACHE:
                        self._amalgams.clear()
                    hit = self._amalgams[key] = tuple(self._amalgamate(c1, c2, pos_a, pos_b, only_b))
                out.update(hit)
        return Ldnf(variables, frozenset(out))

    def _amalgamate(self, c1: Clause, c2: Clause, pos_a, pos_b, only_b) -> Iterator[Clause]:
        """Legal clauses over c1's variables + c2's extra ones restricting to both."""
        emap: dict[int, int] = {}
        for i1, i2 in zip(pos_a, pos_b):
            emap[c2.classes[i2]] = c1.classes[i1]
        pending = sorted({c2.classes[p] for p in only_b} - emap.keys())
        s0 = c1.structure()
        c2facts = c2._factset
        rels = self.vocabulary.proper

        def agrees(e, s, mapping):
            # c2's facts over mapped elements touching e must hold exactly in s
            dom = list(mapping)
            for rel, arity in rels:
                for t in itertools.product(dom, repeat=arity):
                    if e not in t:
                        continue
                    want = (rel, t) in c2facts
                    if s.holds(rel, tuple(mapping[x] for x in t)) != want:
                        return False
            return True

        def rec(i, s, mapping, used):
            if i == len(pending):
                classes = c1.classes + tuple(mapping[c2.classes[p]] for p in only_b)
                yield Clause.from_structure(classes, s)
                return
            e = pending[i]
            for t in range(c1.size):
                if t in used:
                    continue
                mapping[e] = t
                if agrees(e, s, mapping):
                    yield from rec(i + 1, s, mapping, used | {t})
                del mapping[e]
            for ext in self.extensions(s):
                mapping[e] = s.size
                if agrees(e, ext, mapping):
                    yield from rec(i + 1, ext, mapping, used | {s.size})
                del mapping[e]

        yield from rec(0, s0, dict(emap), frozenset(emap.values()))

    def exists(self, d: Ldnf, variables: Iterable[str]) -> Ldnf:
        """Eliminate existentially quantified variables (drop their literals)."""
        drop = set(variables)
        for v in drop:
            if v not in d.variables:
                raise UnknownVariable(f"{v!r} is not among {d.variables}")
        return d.restrict([v for v in d.variables if v not in drop])

    def complement(self, d: Ldnf) -> Ldnf:
        return Ldnf(d.variables, frozenset(self.legal_clauses(d.width)) - d.clauses)

    def forall(self, d: Ldnf, variables: Iterable[str]) -> Ldnf:
        return self.complement(self.exists(self.complement(d), variables))

    # -- formulas --------------------------------------------------------

    def _literal(self, rel: str, args: tuple[str, ...], positive: bool) -> Ldnf:
        variables = tuple(dict.fromkeys(args))
        pos = [variables.index(a) for a in args]
        keep = frozenset(c for c in self.legal_clauses(len(variables)) if c.holds(rel, pos) == positive)
        return Ldnf(variables, keep)

    def normalize(self, f: fm.Formula, variables: Sequence[str] | None = None) -> Ldnf:
        """Ldnf of any first-order formula over ``variables`` (default: its free variables).

        Works bottom-up on the negation normal form, so every intermediate
        ldnf ranges over the free variables of one subformula only.
        """
        fm.check_vocabulary(f, self.vocabulary)
        free = fm.free_vars(f)
        variables = free if variables is None else tuple(variables)
        for v in free:
            if v not in variables:
                raise UnknownVariable(f"free variable {v!r} not among {variables}")
        self.check_width(len(variables))
        return self.align(self._norm(fm.nnf(f)), variables)

    def _norm(self, f: fm.Formula) -> Ldnf:
        if isinstance(f, fm.Rel):
            return self._literal(f.name, f.args, True)
        if isinstance(f, fm.Not):
            return self._literal(f.body.name, f.body.args, False)
        if isinstance(f, fm.Const):
            return ldnf_true() if f.value else ldnf_false()
        if isinstance(f, fm.And):
            # smallest conjuncts first keeps intermediate clause sets small
            parts = sorted((self._norm(p) for p in f.parts), key=lambda d: (d.is_empty() is False, len(d)))
            acc = ldnf_true()
            for p in parts:
                acc = self.conjoin(acc, p)
                if acc.is_empty():
                    variables = tuple(dict.fromkeys(v for q in parts for v in q.variables))
                    return Ldnf(variables, frozenset())
            return acc
        if isinstance(f, fm.Or):
            parts = [self._norm(p) for p in f.parts]
            variables = tuple(dict.fromkeys(v for p in parts for v in p.variables))
            self.check_width(len(variables))
            out = set()
            for p in parts:
                out |= self.align(p, variables).clauses
            return Ldnf(variables, frozenset(out))
        if isinstance(f, (fm.Exists, fm.Forall)):
            body = self._norm(f.body)
            if f.var not in body.variables:
                return body
            if isinstance(f, fm.Exists):
                return self.exists(body, [f.var])
            return self.forall(body, [f.var])
        raise TypeError(f"not a formula: {f!r}")

    def evaluate(self, f: fm.Formula, c: Clause, variables: Sequence[str]) -> bool:
        """Truth of a quantifier-free formula on a complete clause."""
        index = {v: i for i, v in enumerate(variables)}

        def ev(g):
            if isinstance(g, fm.Rel):
                return c.holds(g.name, [index[a] for a in g.args])
            if isinstance(g, fm.Const):
                return g.value
            if isinstance(g, fm.Not):
                return not ev(g.body)
            if isinstance(g, fm.And):
                return all(ev(p) for p in g.parts)
            if isinstance(g, fm.Or):
                return any(ev(p) for p in g.parts)
            raise ValueError("evaluate expects a quantifier-free formula")

        return ev(f)

    def qf_enumerate(self, f: fm.Formula, variables: Sequence[str] | None = None) -> Ldnf:
        """Reference normalization: enumerate legal clauses, keep those satisfying ``f``."""
        if not fm.is_quantifier_free(f):
            raise ValueError("qf_enumerate expects a quantifier-free formula")
        fm.check_vocabulary(f, self.vocabulary)
        free = fm.free_vars(f)
        variables = free if variables is None else tuple(variables)
        for v in free:
            if v not in variables:
                raise UnknownVariable(f"free variable {v!r} not among {variables}")
        keep = frozenset(c for c in self.legal_clauses(len(variables)) if self.evaluate(f, c, variables))
        return Ldnf(tuple(variables), keep)

    def normalize_prenex(self, f: fm.Formula, variables: Sequence[str] | None = None) -> Ldnf:
        """Reference normalization: prenex, enumerate the matrix, eliminate innermost-first."""
        fm.check_vocabulary(f, self.vocabulary)
        free = fm.free_vars(f)
        variables = free if variables is None else tuple(variables)
        for v in free:
            if v not in variables:
                raise UnknownVariable(f"free variable {v!r} not among {variables}")
        fresh = (f"_q{i}" for i in itertools.count())
        prefix, matrix = fm.prenex(f, fresh)
        allvars = tuple(variables) + tuple(v for _, v in prefix)
        self.check_width(len(allvars))
        d = self.qf_enumerate(matrix, allvars)
        for kind, v in reversed(prefix):
            d = self.exists(d, [v]) if kind == "exists" else self.forall(d, [v])
        return d.reorder(tuple(variables))

    def satisfiable(self, f: fm.Formula) -> bool:
        return not self.normalize(f).is_empty()

    # -- rendering -------------------------------------------------------

    def _implied_free(self, c: Clause) -> tuple[tuple[str, tuple[int, ...], bool], ...]:
        """Literals over c's elements that pin down c among legal structures of its size.

        Greedily drops literals (negative ones first, then ones with repeated
        arguments) whose value follows from the rest.
        """
        cached = self._render_cache.get(c)
        if cached is not None:
            return cached
        n = c.size
        rivals = [d for d in self.legal_clauses(n) if d.classes == tuple(range(n))] if n <= self.max_width else []
        lits = []
        for rel, arity in self.vocabulary.proper:
            for t in itertools.product(range(n), repeat=arity):
                lits.append((rel, t, (rel, t) in c._factset))
        order = sorted(
            range(len(lits)), key=lambda i: (lits[i][2], len(set(lits[i][1])) == len(lits[i][1]), -i)
        )
        kept = set(lits)
        for i in order:
            trial = kept - {lits[i]}
            agree = [d for d in rivals if all(((r, t) in d._factset) == v for r, t, v in trial)]
            if len(agree) == 1:
                kept = trial
        out = tuple(lit for lit in lits if lit in kept)
        self._render_cache[c] = out
        return out

    def render_clause(self, c: Clause, names: Sequence[str]) -> fm.Formula:
        """Short formula equivalent to ``c`` (given the atoms) over ``names``."""
        parts, reps = c._equality_parts(names)
        for rel, t, v in self._implied_free(c):
            atom = fm.Rel(rel, tuple(reps[e] for e in t))
            parts.append(atom if v else fm.Not(atom))
        return fm.conj(parts) if parts else fm.TRUE

    def render(self, d: Ldnf) -> fm.Formula:
        clauses = d.sorted_clauses()
        if not clauses:
            return fm.FALSE
        return fm.disj(self.render_clause(c, d.variables) for c in clauses)


def _partitions(n: int) -> Iterator[list[int]]:
    """Set partitions of n positions as restricted growth strings."""

    def rec(prefix, blocks):
        if len(prefix) == n:
            yield list(prefix)
            return
        for b in range(blocks + 1):
            yield from rec(prefix + [b], max(blocks, b + 1))

    yield from rec([], 0)


@lru_cache(maxsize=64)
def theory(backend: AtomBackend, max_width: int = DEFAULT_MAX_WIDTH) -> Theory:
    """Shared Theory per (backend, budget) so enumeration caches are reused."""
    return Theory(backend, max_width)


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def is_legal(backend: AtomBackend, c: Clause) -> bool:
    return theory(backend).is_legal(c)


def enumerate_legal_clauses(backend: AtomBackend, variables: Sequence[str], max_width: int = DEFAULT_MAX_WIDTH) -> Ldnf:
    return theory(backend, max_width).top(variables)


def complete_clause_of(backend: AtomBackend, atoms: Sequence) -> Clause:
    return theory(backend).clause_of(atoms)


def qf_to_ldnf(backend: AtomBackend, f: fm.Formula, variables=None, max_width: int = DEFAULT_MAX_WIDTH) -> Ldnf:
    if not fm.is_quantifier_free(f):
        raise ValueError("qf_to_ldnf expects a quantifier-free formula")
    return theory(backend, max_width).normalize(f, variables)


def eliminate_exists(backend: AtomBackend, v: str, d: Ldnf) -> Ldnf:
    return theory(backend).exists(d, [v])


def fo_to_ldnf(backend: AtomBackend, f: fm.Formula, variables=None, max_width: int = DEFAULT_MAX_WIDTH) -> Ldnf:
    return theory(backend, max_width).normalize(f, variables)


def satisfiable(backend: AtomBackend, f: fm.Formula, max_width: int = DEFAULT_MAX_WIDTH) -> bool:
    return theory(backend, max_width).satisfiable(f)
