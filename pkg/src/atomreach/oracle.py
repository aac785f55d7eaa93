"""Explicit-state ground truth over a finite set of concrete atoms.

Definable sets, automata and pushdown systems are expanded into ordinary
finite ones, saturated by the textbook algorithm, and compared against the
symbolic engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .atoms import AtomBackend, get_backend
from .automata import Configuration, FoNfa, FoPds, FoSet, label_str
from .errors import CapabilityUnsupported, VariableMismatch
from .logic import Ldnf, Theory
from .reachability import prestar_member, saturated

DEFAULT_UNIVERSES = {
    "equality": ("#0", "#1", "#2", "#3"),
    "total_order": ("0", "1", "2", "3"),
    "equivalence": ("0:0", "0:1", "1:0", "1:1"),
    "graph": ("0", "1", "2", "3", "4", "5"),
}


@dataclass(frozen=True)
class FiniteUniverse:
    backend: AtomBackend
    atoms: tuple

    def __post_init__(self):
        if not self.backend.has_model:
            raise CapabilityUnsupported(f"{self.backend.name} atoms have no concrete model")
        atoms = tuple(self.atoms)
        for a, b in itertools.combinations(atoms, 2):
            if self.backend.eval_relation("eq", (a, b)):
                raise VariableMismatch(f"universe atoms {a} and {b} coincide")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def parse(cls, backend: AtomBackend, texts: Iterable[str]) -> "FiniteUniverse":
        return cls(backend, tuple(backend.parse_atom(t.strip()) for t in texts))

    @classmethod
    def default(cls, backend: AtomBackend | str) -> "FiniteUniverse":
        if isinstance(backend, str):
            backend = get_backend(backend)
        if backend.name not in DEFAULT_UNIVERSES:
            raise CapabilityUnsupported(f"no default universe for {backend.name} atoms")
        return cls.parse(backend, DEFAULT_UNIVERSES[backend.name])

    @classmethod
    def of_size(cls, backend: AtomBackend, n: int) -> "FiniteUniverse":
        return cls(backend, tuple(backend.sample()[:n]))


def realizations(theory: Theory, d: Ldnf, atoms: Sequence) -> list[tuple]:
    """All tuples over ``atoms`` whose complete clause lies in ``d``."""
    n = d.width
    prefixes = [frozenset(c.project(range(i)) for c in d.clauses) for i in range(n + 1)]
    out = []

    def rec(prefix):
        i = len(prefix)
        if theory.clause_of(prefix) not in prefixes[i]:
            return
        if i == n:
            out.append(tuple(prefix))
            return
        for a in atoms:
            rec(prefix + [a])

    if d.clauses:
        rec([])
    return out


@dataclass(frozen=True)
class ExplicitNfa:
    states: frozenset
    finals: frozenset
    delta: frozenset  # (state, letter, state); states and letters are (label, atoms)

    def successors(self):
        table: dict = {}
        for q, a, r in self.delta:
            table.setdefault((q, a), set()).add(r)
        return table

    def accepts(self, start, word) -> bool:
        table = self.successors()
        current = {start}
        for a in word:
            current = set().union(*(table.get((q, a), ()) for q in current)) if current else set()
        return bool(current & self.finals)


@dataclass(frozen=True)
class ExplicitPds:
    locations: frozenset
    letters: frozenset
    push: frozenset  # (loc, letter, loc, letter, letter)
    pop: frozenset  # (loc, letter, loc)

    def successors(self, config):
        """One-step successors of (location, stack) with the stack a tuple, top first."""
        loc, stack = config
        if not stack:
            return
        top, rest = stack[0], stack[1:]
        for p, a, p2, b, c in self.push:
            if p == loc and a == top:
                yield p2, (b, c) + rest
        for p, a, p2 in self.pop:
            if p == loc and a == top:
                yield p2, rest


def instantiate_set(theory: Theory, universe: FiniteUniverse, s: FoSet) -> frozenset:
    return frozenset((label, t) for label in s.labels for t in realizations(theory, s[label], universe.atoms))


def _split(t, dims):
    out, i = [], 0
    for n in dims:
        out.append(tuple(t[i:i + n]))
        i += n
    return out


def instantiate_nfa(theory: Theory, universe: FiniteUniverse, nfa: FoNfa) -> ExplicitNfa:
    states = instantiate_set(theory, universe, nfa.states)
    finals = frozenset((label, t) for label, d in nfa.finals.items() for t in realizations(theory, d, universe.atoms))
    delta = set()
    for (src, k, dst), d in nfa.delta.items():
        dims = (nfa.states.dim(src), nfa.alphabet.dim(k), nfa.states.dim(dst))
        for t in realizations(theory, d, universe.atoms):
            x, y, p = _split(t, dims)
            delta.add(((src, x), (k, y), (dst, p)))
    return ExplicitNfa(states, finals, frozenset(delta))


def instantiate_pds(theory: Theory, universe: FiniteUniverse, pds: FoPds) -> ExplicitPds:
    push, pop = set(), set()
    g, L = pds.alphabet, pds.locations
    for (l, k, l2, k1, k2), d in pds.push.items():
        dims = (L.dim(l), g.dim(k), L.dim(l2), g.dim(k1), g.dim(k2))
        for t in realizations(theory, d, universe.atoms):
            x, y, p, u, v = _split(t, dims)
            push.add(((l, x), (k, y), (l2, p), (k1, u), (k2, v)))
    for (l, k, l2), d in pds.pop.items():
        dims = (L.dim(l), g.dim(k), L.dim(l2))
        for t in realizations(theory, d, universe.atoms):
            x, y, p = _split(t, dims)
            pop.add(((l, x), (k, y), (l2, p)))
    return ExplicitPds(
        instantiate_set(theory, universe, L), instantiate_set(theory, universe, g), frozenset(push), frozenset(pop)
    )


def instantiate(theory: Theory, universe: FiniteUniverse, x):
    """Finite counterpart of a definable set, automaton or pushdown system."""
    if isinstance(x, FoSet):
        return instantiate_set(theory, universe, x)
    if isinstance(x, FoNfa):
        return instantiate_nfa(theory, universe, x)
    if isinstance(x, FoPds):
        return instantiate_pds(theory, universe, x)
    if isinstance(x, Ldnf):
        return realizations(theory, x, universe.atoms)
    raise TypeError(f"cannot instantiate {type(x).__name__}")


def explicit_saturate(pds: ExplicitPds, nfa: ExplicitNfa) -> tuple[ExplicitNfa, int]:
    """Textbook saturation on finite sets; returns the automaton and the pass count."""
    delta = set(nfa.delta) | set(pds.pop)
    passes = 0
    while True:
        passes += 1
        table: dict = {}
        for q, a, r in delta:
            table.setdefault((q, a), set()).add(r)
        forced = set()
        for p, a, p2, b, c in pds.push:
            for q3 in table.get((p2, b), ()):
                for q in table.get((q3, c), ()):
                    forced.add((p, a, q))
        if forced <= delta:
            break
        delta |= forced
    return ExplicitNfa(nfa.states, nfa.finals, frozenset(delta)), passes


def explicit_prestar_member(pds: ExplicitPds, nfa: ExplicitNfa, config) -> bool:
    """``config`` is ``(state, stack)`` with explicit states and letters."""
    sat, _ = explicit_saturate(pds, nfa)
    return sat.accepts(config[0], config[1])


def explicit_reachable(pds: ExplicitPds, nfa: ExplicitNfa, config, stack_bound: int) -> bool:
    """Bounded forward search: does ``config`` reach an accepted configuration
    without the stack growing beyond ``stack_bound``?"""
    seen = {config}
    todo = [config]
    while todo:
        c = todo.pop()
        if nfa.accepts(c[0], c[1]):
            return True
        for n in pds.successors(c):
            if len(n[1]) <= stack_bound and n not in seen:
                seen.add(n)
                todo.append(n)
    return False


@dataclass
class CrossCheckReport:
    checked: int = 0
    explicit_accepted: int = 0
    symbolic_accepted: int = 0
    classical: bool = False
    violations: list = field(default_factory=list)
    automata_equal: bool | None = None
    transitions_contained: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations and self.transitions_contained and self.automata_equal is not False

    def summary(self) -> str:
        lines = [
            f"configurations checked: {self.checked}",
            f"explicit members: {self.explicit_accepted}",
            f"symbolic members: {self.symbolic_accepted}",
            f"explicit transitions contained in symbolic: {'yes' if self.transitions_contained else 'no'}",
        ]
        if self.classical:
            lines.append(f"classical instance, automata equal: {'yes' if self.automata_equal else 'no'}")
        lines.append(f"violations: {len(self.violations)}")
        lines += [f"  {v}" for v in self.violations[:20]]
        return "\n".join(lines)


def _is_classical(pds: FoPds, nfa: FoNfa) -> bool:
    dims = list(pds.alphabet.components.values()) + list(pds.locations.components.values())
    dims += list(nfa.states.components.values())
    return all(d.width == 0 for d in dims)


def cross_check(theory: Theory, universe: FiniteUniverse, pds: FoPds, nfa: FoNfa, stack_bound: int) -> CrossCheckReport:
    """Compare explicit and symbolic Pre* membership on every bounded configuration.

    Explicit membership must imply symbolic membership; on classical
    (all dimensions zero) instances the two must coincide, and so must the
    saturated automata.
    """
    report = CrossCheckReport(classical=_is_classical(pds, nfa))
    epds = instantiate_pds(theory, universe, pds)
    enfa = instantiate_nfa(theory, universe, nfa)
    esat, _ = explicit_saturate(epds, enfa)
    sym = saturated(theory, pds, nfa).automaton
    ssat = instantiate_nfa(theory, universe, sym)
    report.transitions_contained = esat.delta <= ssat.delta
    if report.classical:
        report.automata_equal = esat.delta == ssat.delta
    table, stable = esat.successors(), ssat.successors()
    letters = sorted(epds.letters, key=lambda a: (label_str(a[0]), tuple(map(str, a[1]))))
    starts = sorted(epds.locations, key=lambda a: (label_str(a[0]), tuple(map(str, a[1]))))

    def step(tab, current, a):
        return set().union(*(tab.get((q, a), ()) for q in current)) if current else set()

    def visit(loc, word, current, scurrent):
        report.checked += 1
        explicit = bool(current & esat.finals)
        report.explicit_accepted += explicit
        if explicit or report.classical:
            # a run of the instantiated symbolic automaton is a run of the
            # symbolic one; otherwise ask the symbolic automaton itself
            symbolic = bool(scurrent & ssat.finals)
            config = Configuration(loc[0], loc[1], tuple(word))
            if not symbolic:
                symbolic = prestar_member(theory, pds, nfa, config)
            report.symbolic_accepted += symbolic
            if explicit and not symbolic:
                report.violations.append(f"explicit member rejected symbolically: {config}")
            elif symbolic and not explicit:
                report.violations.append(f"classical instance accepts a non-member symbolically: {config}")
        if len(word) == stack_bound:
            return
        if not current and not report.classical:
            # every extension is an explicit non-member; only count them
            report.checked += sum(len(letters) ** j for j in range(1, stack_bound - len(word) + 1))
            return
        for a in letters:
            word.append(a)
            visit(loc, word, step(table, current, a), step(stable, scurrent, a))
            word.pop()

    for loc in starts:
        visit(loc, [], {loc}, {loc})
    return report
