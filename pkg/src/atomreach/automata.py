"""FO-definable sets, automata and pushdown systems.

Every constraint is an :class:`~atomreach.logic.Ldnf` over positional
variable blocks:

* a set component of dimension n ranges over ``x1..xn``;
* a transition ``(l, k, l')`` ranges over ``x`` (source state), ``y``
  (letter) and ``p`` (target state);
* a push rule ``(l, k, l2, k1, k2)`` ranges over ``x, y, p, u, v``; a pop
  rule ``(l, k, l2)`` over ``x, y, p``.

Missing transition or rule entries are empty. Labels are strings, or tuples
of labels for product automata.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import AlphabetMismatch, VariableMismatch
from .logic import Clause, Ldnf, Theory

Label = Hashable


def block(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def label_str(label: Label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(label_str(x) for x in label) + ")"
    return str(label)


class _Frozen:
    """Equality and hashing by the sorted contents of the mapping fields."""

    _fields: tuple[str, ...] = ()

    def _canon(self):
        out = []
        for name in self._fields:
            value = getattr(self, name)
            if isinstance(value, Mapping):
                value = tuple(sorted(value.items(), key=lambda kv: repr(kv[0])))
            out.append(value)
        return tuple(out)

    def __eq__(self, other):
        return type(self) is type(other) and self._canon() == other._canon()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self._canon())
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, eq=False)
class FoSet(_Frozen):
    """Finite indexed union of definable subsets of atom tuples."""

    components: Mapping[Label, Ldnf]
    _fields = ("components",)

    def __post_init__(self):
        comps = dict(self.components)
        for label, d in comps.items():
            if d.variables != block("x", d.width):
                raise VariableMismatch(f"component {label_str(label)} must range over x1..x{d.width}")
        object.__setattr__(self, "components", comps)

    def dim(self, label: Label) -> int:
        return self.components[label].width

    def __contains__(self, label) -> bool:
        return label in self.components

    def __getitem__(self, label) -> Ldnf:
        return self.components[label]

    @property
    def labels(self) -> list[Label]:
        return sorted(self.components, key=label_str)


@dataclass(frozen=True, eq=False)
class FoNfa(_Frozen):
    alphabet: FoSet
    states: FoSet
    finals: Mapping[Label, Ldnf] = field(default_factory=dict)
    delta: Mapping[tuple, Ldnf] = field(default_factory=dict)
    _fields = ("alphabet", "states", "finals", "delta")

    def __post_init__(self):
        object.__setattr__(self, "finals", {k: v for k, v in self.finals.items() if not v.is_empty()})
        object.__setattr__(self, "delta", {k: v for k, v in self.delta.items() if not v.is_empty()})
        for label, d in self.finals.items():
            if label not in self.states or d.variables != block("x", self.states.dim(label)):
                raise VariableMismatch(f"final constraint of {label_str(label)} has variables {d.variables}")
        for key, d in self.delta.items():
            want = self.transition_vars(*key)
            if d.variables != want:
                raise VariableMismatch(f"transition {_key_str(key)} has variables {d.variables}, expected {want}")

    def transition_vars(self, src, letter, dst) -> tuple[str, ...]:
        return (
            block("x", self.states.dim(src))
            + block("y", self.alphabet.dim(letter))
            + block("p", self.states.dim(dst))
        )

    def transition(self, src, letter, dst) -> Ldnf:
        d = self.delta.get((src, letter, dst))
        return d if d is not None else Ldnf(self.transition_vars(src, letter, dst))

    def final(self, label) -> Ldnf:
        d = self.finals.get(label)
        return d if d is not None else Ldnf(block("x", self.states.dim(label)))

    def with_delta(self, delta: Mapping[tuple, Ldnf]) -> "FoNfa":
        return FoNfa(self.alphabet, self.states, self.finals, delta)

    def sorted_delta(self):
        return sorted(self.delta.items(), key=lambda kv: tuple(label_str(x) for x in kv[0]))


@dataclass(frozen=True, eq=False)
class FoPds(_Frozen):
    alphabet: FoSet
    locations: FoSet
    push: Mapping[tuple, Ldnf] = field(default_factory=dict)
    pop: Mapping[tuple, Ldnf] = field(default_factory=dict)
    _fields = ("alphabet", "locations", "push", "pop")

    def __post_init__(self):
        object.__setattr__(self, "push", {k: v for k, v in self.push.items() if not v.is_empty()})
        object.__setattr__(self, "pop", {k: v for k, v in self.pop.items() if not v.is_empty()})
        for key, d in self.push.items():
            if len(key) != 5:
                raise VariableMismatch(f"push rule key {key} must be (loc, letter, loc, letter, letter)")
            if d.variables != self.push_vars(*key):
                raise VariableMismatch(f"push rule {_key_str(key)} has variables {d.variables}")
        for key, d in self.pop.items():
            if len(key) != 3:
                raise VariableMismatch(f"pop rule key {key} must be (loc, letter, loc)")
            if d.variables != self.pop_vars(*key):
                raise VariableMismatch(f"pop rule {_key_str(key)} has variables {d.variables}")

    def push_vars(self, l, k, l2, k1, k2) -> tuple[str, ...]:
        return (
            block("x", self.locations.dim(l))
            + block("y", self.alphabet.dim(k))
            + block("p", self.locations.dim(l2))
            + block("u", self.alphabet.dim(k1))
            + block("v", self.alphabet.dim(k2))
        )

    def pop_vars(self, l, k, l2) -> tuple[str, ...]:
        return block("x", self.locations.dim(l)) + block("y", self.alphabet.dim(k)) + block("p", self.locations.dim(l2))

    def sorted_push(self):
        return sorted(self.push.items(), key=lambda kv: tuple(label_str(x) for x in kv[0]))

    def sorted_pop(self):
        return sorted(self.pop.items(), key=lambda kv: tuple(label_str(x) for x in kv[0]))


@dataclass(frozen=True)
class Configuration:
    """A location with its atoms and a stack, top letter first."""

    location: Label
    state_atoms: tuple = ()
    stack: tuple[tuple[Label, tuple], ...] = ()

    def __str__(self):
        def fmt(label, atoms):
            return f"{label_str(label)}({','.join(map(str, atoms))})"

        return fmt(self.location, self.state_atoms) + " | " + " ".join(fmt(k, a) for k, a in self.stack)


def _key_str(key) -> str:
    return "(" + ", ".join(label_str(x) for x in key) + ")"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    where: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, where, message):
        self.violations.append(Violation(kind, where, message))

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "valid" if self.ok else "\n".join(map(str, self.violations))


def _check_blocks(report, where, d: Ldnf, blocks: Sequence[tuple[str, FoSet, Label]]):
    """Every clause of ``d`` restricts, on each block, into the block's component."""
    start = 0
    bad = set()
    for name, fs, label in blocks:
        n = fs.dim(label)
        allowed = fs[label].clauses
        pos = list(range(start, start + n))
        for c in d.clauses:
            if c.project(pos) not in allowed:
                bad.add(name)
                break
        start += n
    for name in sorted(bad):
        report.add("block-restriction", where, f"the {name} block leaves its declared set")


def _check_width(report, where, width, theory):
    if theory is not None and width > theory.max_width:
        report.add("width-budget", where, f"width {width} exceeds the budget {theory.max_width}")


def validate_nfa(nfa: FoNfa, theory: Theory | None = None, report: ValidationReport | None = None) -> ValidationReport:
    report = report if report is not None else ValidationReport()
    for label in nfa.states.labels:
        _check_width(report, f"state {label_str(label)}", nfa.states.dim(label), theory)
    for label, d in sorted(nfa.finals.items(), key=lambda kv: label_str(kv[0])):
        if not d.entails(nfa.states[label]):
            report.add("final-not-state", f"state {label_str(label)}", "final constraint is not within the state constraint")
    for (src, k, dst), d in nfa.sorted_delta():
        where = f"transition {_key_str((src, k, dst))}"
        missing = [label_str(x) for x in (src, dst) if x not in nfa.states] + (
            [label_str(k)] if k not in nfa.alphabet else []
        )
        if missing:
            report.add("unknown-index", where, f"undeclared {', '.join(missing)}")
            continue
        _check_width(report, where, d.width, theory)
        _check_blocks(report, where, d, [("source", nfa.states, src), ("letter", nfa.alphabet, k), ("target", nfa.states, dst)])
    return report


def validate_pds(pds: FoPds, theory: Theory | None = None, report: ValidationReport | None = None) -> ValidationReport:
    report = report if report is not None else ValidationReport()
    locs, gamma = pds.locations, pds.alphabet
    for key, d in pds.sorted_push():
        where = f"push rule {_key_str(key)}"
        l, k, l2, k1, k2 = key
        _check_width(report, where, d.width, theory)
        _check_blocks(
            report,
            where,
            d,
            [("source", locs, l), ("letter", gamma, k), ("target", locs, l2), ("first pushed", gamma, k1), ("second pushed", gamma, k2)],
        )
    for key, d in pds.sorted_pop():
        where = f"pop rule {_key_str(key)}"
        l, k, l2 = key
        _check_width(report, where, d.width, theory)
        _check_blocks(report, where, d, [("source", locs, l), ("letter", gamma, k), ("target", locs, l2)])
    return report


def forced_width(pds: FoPds, nfa: FoNfa) -> int:
    """Largest number of variables one forced-step conjunction needs."""
    best = 0
    sd = nfa.states.components
    for (l, k, l2, k1, k2) in pds.push:
        mid = max((v.width for v in sd.values()), default=0)
        base = pds.locations.dim(l) + pds.alphabet.dim(k) + pds.alphabet.dim(k1) + pds.alphabet.dim(k2)
        best = max(best, base + pds.locations.dim(l2) + mid, base + 2 * mid)
    return best


def validate(pds: FoPds, nfa: FoNfa, theory: Theory | None = None) -> ValidationReport:
    """Check that ``nfa`` is a P-automaton for ``pds`` suitable for saturation."""
    report = ValidationReport()
    if pds.alphabet != nfa.alphabet:
        report.add("alphabet-mismatch", "alphabet", "the PDS and the NFA declare different alphabets")
    for label in pds.locations.labels:
        where = f"location {label_str(label)}"
        if label not in nfa.states:
            report.add("location-not-state", where, "location is not a state of the NFA")
        elif pds.locations.dim(label) != nfa.states.dim(label):
            report.add("dimension-mismatch", where, "location and state dimensions differ")
        elif not pds.locations[label].entails(nfa.states[label]):
            report.add("location-not-in-state", where, "location constraint is not entailed by the state constraint")
    for (src, k, dst), _ in nfa.sorted_delta():
        if dst in pds.locations:
            report.add("incoming-to-location", f"transition {_key_str((src, k, dst))}", "incoming transition to P-state")
    validate_pds(pds, theory, report)
    validate_nfa(nfa, theory, report)
    if theory is not None and not report.violations:
        w = forced_width(pds, nfa)
        if w > theory.max_width:
            report.add("width-budget", "saturation", f"forced step needs width {w}, budget is {theory.max_width}")
    return report


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def orbit_count(s: FoSet) -> int:
    return sum(len(d) for d in s.components.values())


def full_set(theory: Theory, dims: Mapping[Label, int]) -> FoSet:
    """The unconstrained set with the given component dimensions."""
    return FoSet({label: theory.top(block("x", n)) for label, n in dims.items()})


def _shift(d: Ldnf, mapping: Mapping[str, str]) -> Ldnf:
    return d.rename([mapping.get(v, v) for v in d.variables])


def _pair_rename(dim_a: int, dim_b: int, prefix: str):
    ra = {f"{prefix}{i}": f"{prefix}{i}" for i in range(1, dim_a + 1)}
    rb = {f"{prefix}{i}": f"{prefix}{dim_a + i}" for i in range(1, dim_b + 1)}
    return ra, rb


def product_nfa(theory: Theory, a: FoNfa, b: FoNfa) -> FoNfa:
    """Synchronous product; states are label pairs with concatenated atoms."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("product of NFAs over different alphabets")
    states = {}
    finals = {}
    for la in a.states.labels:
        for lb in b.states.labels:
            na, nb = a.states.dim(la), b.states.dim(lb)
            theory.check_width(na + nb, "product state")
            _, rb = _pair_rename(na, nb, "x")
            states[(la, lb)] = theory.conjoin(a.states[la], _shift(b.states[lb], rb))
            fa, fb = a.finals.get(la), b.finals.get(lb)
            if fa is not None and fb is not None:
                finals[(la, lb)] = theory.conjoin(fa, _shift(fb, rb))
    delta = {}
    by_letter: dict = {}
    for (lb, k, lb2), d in b.delta.items():
        by_letter.setdefault(k, []).append((lb, lb2, d))
    for (la, k, la2), da in a.sorted_delta():
        for lb, lb2, db in by_letter.get(k, ()):
            na, nb = a.states.dim(la), b.states.dim(lb)
            ma, mb = a.states.dim(la2), b.states.dim(lb2)
            _, rx = _pair_rename(na, nb, "x")
            _, rp = _pair_rename(ma, mb, "p")
            order = block("x", na + nb) + block("y", a.alphabet.dim(k)) + block("p", ma + mb)
            theory.check_width(len(order), "product transition")
            d = theory.conjoin(da, _shift(db, {**rx, **rp})).reorder(order)
            if not d.is_empty():
                delta[((la, lb), k, (la2, lb2))] = d
    return FoNfa(a.alphabet, FoSet(states), finals, delta)


def nfa_nonempty(
    nfa: FoNfa,
    start: Iterable[Label],
    start_constraints: Mapping[Label, Ldnf] | None = None,
) -> bool:
    """Does some state in a start component accept some word?

    Breadth-first search over (label, clause of the state tuple). A clause
    can take a transition iff some transition clause restricts to it on the
    source block; the target clause is that transition clause's restriction
    on the target block.
    """
    start_constraints = start_constraints or {}
    succ: dict[Label, dict[Clause, set]] = {}
    for (src, k, dst), d in nfa.delta.items():
        n, m, t = nfa.states.dim(src), nfa.alphabet.dim(k), nfa.states.dim(dst)
        xs, ps = list(range(n)), list(range(n + m, n + m + t))
        table = succ.setdefault(src, {})
        for c in d.clauses:
            table.setdefault(c.project(xs), set()).add((dst, c.project(ps)))
    seen = set()
    queue = deque()
    for label in start:
        if label not in nfa.states:
            continue
        allowed = nfa.states[label].clauses
        if label in start_constraints:
            allowed = allowed & start_constraints[label].clauses
        for c in sorted(allowed):
            if (label, c) not in seen:
                seen.add((label, c))
                queue.append((label, c))
    while queue:
        label, c = queue.popleft()
        if c in nfa.final(label).clauses:
            return True
        for nxt in sorted(succ.get(label, {}).get(c, ()), key=lambda t: (label_str(t[0]), t[1])):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def nfa_accepts(theory: Theory, nfa: FoNfa, start: tuple[Label, Sequence], word: Sequence[tuple[Label, Sequence]]) -> bool:
    """Does ``nfa`` accept ``word`` (top letter first) from the concrete state ``start``?

    The distinct atoms of the query become variables ``a0..``; the run is a
    map from state label to the ldnf of possible state tuples over those
    variables, advanced one letter at a time with the previous state block
    eliminated.
    """
    label, state_atoms = start
    state_atoms = tuple(state_atoms)
    if label not in nfa.states:
        return False
    if len(state_atoms) != nfa.states.dim(label):
        raise VariableMismatch(f"state {label_str(label)} expects {nfa.states.dim(label)} atoms")
    for k, atoms in word:
        if k not in nfa.alphabet:
            raise AlphabetMismatch(f"letter {label_str(k)} is not in the alphabet")
        if len(atoms) != nfa.alphabet.dim(k):
            raise VariableMismatch(f"letter {label_str(k)} expects {nfa.alphabet.dim(k)} atoms")
    everything = list(state_atoms) + [a for _, atoms in word for a in atoms]
    pos_clause = theory.clause_of(everything)
    key = (nfa, label, tuple(k for k, _ in word), pos_clause)
    cached = _ACCEPT_CACHE.get((theory, key))
    if cached is not None:
        return cached
    result = _accepts(theory, nfa, label, len(state_atoms), [(k, len(a)) for k, a in word], pos_clause)
    if len(_ACCEPT_CACHE) > 100_000:
        _ACCEPT_CACHE.clear()
    _ACCEPT_CACHE[(theory, key)] = result
    return result


_ACCEPT_CACHE: dict = {}


def _accepts(theory, nfa, label, n_state, letters, pos_clause: Clause) -> bool:
    # one variable per distinct atom
    m = pos_clause.size
    avars = tuple(f"a{i}" for i in range(m))
    reps = [pos_clause.classes.index(e) for e in range(m)]
    base = pos_clause.project(reps)
    theory.check_width(m, "acceptance query")
    slots = [avars[e] for e in pos_clause.classes]

    sblock = block("s", n_state)
    # clause over avars + state block; the state atoms come first in the query
    full = Clause(base.classes + pos_clause.classes[:n_state], base.facts)
    runs: dict[Label, Ldnf] = {label: Ldnf(avars + sblock, frozenset({full}))}
    offset = n_state
    for k, width in letters:
        ys = slots[offset:offset + width]
        offset += width
        nxt: dict[Label, set] = {}
        nxt_vars: dict[Label, tuple] = {}
        for src, run in runs.items():
            for dst in nfa.states.labels:
                d = nfa.delta.get((src, k, dst))
                if d is None:
                    continue
                ns, nt = nfa.states.dim(src), nfa.states.dim(dst)
                tblock = block("t", nt)
                mapping = dict(zip(block("x", ns), block("s", ns)))
                mapping.update(zip(block("y", width), ys))
                mapping.update(zip(block("p", nt), tblock))
                step = theory.conjoin(run, d.substitute(mapping))
                step = theory.exists(step, block("s", ns))
                step = step.reorder(avars + tblock).rename(avars + block("s", nt))
                nxt.setdefault(dst, set()).update(step.clauses)
                nxt_vars[dst] = avars + block("s", nt)
        runs = {dst: Ldnf(nxt_vars[dst], frozenset(cs)) for dst, cs in nxt.items() if cs}
        if not runs:
            return False
    for dst, run in runs.items():
        f = nfa.finals.get(dst)
        if f is None:
            continue
        n = nfa.states.dim(dst)
        if not theory.conjoin(run, _shift(f, dict(zip(block("x", n), block("s", n))))).is_empty():
            return True
    return False
