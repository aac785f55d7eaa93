"""Backward saturation of a P-automaton under the rules of a pushdown system.

A transition ``(l, k, l')`` is forced when a push rule from ``l`` reading
``k`` leads to ``l2`` with ``k1 k2`` on top, and the automaton can read
``k1`` from ``l2`` to some ``l3`` and then ``k2`` from ``l3`` to ``l'``.
The saturated automaton is the least fixpoint of adding forced transitions
to the input transitions and the pop rules.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .automata import FoNfa, FoPds, block, label_str, validate
from .errors import ValidationError
from .logic import Ldnf, Theory

log = logging.getLogger(__name__)


@dataclass
class SaturationResult:
    automaton: FoNfa
    iterations: int
    added_clauses: dict = field(default_factory=dict)

    @property
    def total_added(self) -> int:
        return sum(self.added_clauses.values())


def _rename(d: Ldnf, blocks: Mapping[str, str]) -> Ldnf:
    """Rename each variable ``<b><i>`` to ``<blocks[b]><i>``."""
    return d.rename([blocks[v.rstrip("0123456789")] + v[len(v.rstrip("0123456789")):] for v in d.variables])


class _Forcer:
    """One forced-step computation, split in two joins so the first can be reused.

    ``first(rule, a1)`` joins the push rule with the transition reading the
    first pushed letter and keeps (x, y, v, w); ``second(j1, a2)`` joins with
    the transition reading the second pushed letter and keeps (x, y, p).
    """

    def __init__(self, theory: Theory, pds: FoPds, nfa: FoNfa):
        self.theory = theory
        self.pds = pds
        self.nfa = nfa

    def first(self, key, rule: Ldnf, a1: Ldnf) -> Ldnf:
        t = self.theory
        r = _rename(rule, {"x": "x", "y": "y", "p": "m", "u": "u", "v": "v"})
        a = _rename(a1, {"x": "m", "y": "u", "p": "w"})
        j = t.conjoin(r, a)
        return t.exists(j, [v for v in j.variables if v[0] in "mu"])

    def second(self, j1: Ldnf, a2: Ldnf, l, k, dst) -> Ldnf:
        t = self.theory
        a = _rename(a2, {"x": "w", "y": "v", "p": "p"})
        j = t.conjoin(j1, a)
        j = t.exists(j, [v for v in j.variables if v[0] in "vw"])
        order = block("x", self.nfa.states.dim(l)) + block("y", self.nfa.alphabet.dim(k)) + block("p", self.nfa.states.dim(dst))
        return t.align(j, order)


def forced(theory: Theory, pds: FoPds, nfa: FoNfa, delta: Mapping[tuple, Ldnf] | None = None) -> dict:
    """The transitions forced by one push step from ``delta`` (default: nfa.delta)."""
    delta = nfa.delta if delta is None else delta
    f = _Forcer(theory, pds, nfa)
    out: dict[tuple, set] = {}
    states = nfa.states.labels
    for key, rule in pds.sorted_push():
        l, k, l2, k1, k2 = key
        for l3 in states:
            a1 = delta.get((l2, k1, l3))
            if a1 is None or a1.is_empty():
                continue
            j1 = f.first(key, rule, a1)
            if j1.is_empty():
                continue
            for dst in states:
                a2 = delta.get((l3, k2, dst))
                if a2 is None or a2.is_empty():
                    continue
                out.setdefault((l, k, dst), set()).update(f.second(j1, a2, l, k, dst).clauses)
    return {key: Ldnf(nfa.transition_vars(*key), frozenset(cs)) for key, cs in out.items() if cs}


def _merge(a: dict, b: Mapping) -> None:
    for key, cs in b.items():
        a.setdefault(key, set()).update(cs)


def saturate(theory: Theory, pds: FoPds, nfa: FoNfa, check: bool = True) -> SaturationResult:
    """Saturate ``nfa`` so it accepts every predecessor of its language.

    Each pass computes the forced transitions of the current transition set
    and adds them; the loop stops after the first pass that adds nothing,
    and ``iterations`` counts passes including that last one. Passes only
    join against clauses that are new since the previous pass, which gives
    the same result as recomputing everything.
    """
    if check:
        report = validate(pds, nfa, theory)
        if not report.ok:
            raise ValidationError(report)
    f = _Forcer(theory, pds, nfa)

    current: dict[tuple, set] = {key: set(d.clauses) for key, d in nfa.delta.items()}
    for (l, k, l2), d in pds.pop.items():
        current.setdefault((l, k, l2), set()).update(d.clauses)
    initial = {key: frozenset(cs) for key, cs in current.items()}
    fresh: dict[tuple, set] = {key: set(cs) for key, cs in current.items()}
    j1_acc: dict[tuple, set] = {}
    rules = pds.sorted_push()

    def as_ldnf(key, cs) -> Ldnf:
        return Ldnf(nfa.transition_vars(*key), frozenset(cs))

    succ: dict[tuple, set] = {}
    for (src, k, dst) in current:
        succ.setdefault((src, k), set()).add(dst)

    iterations = 0
    while True:
        iterations += 1
        produced: dict[tuple, set] = {}
        for key, rule in rules:
            l, k, l2, k1, k2 = key
            for l3 in sorted(succ.get((l2, k1), ()), key=label_str):
                acc_key = (key, l3)
                old = j1_acc.get(acc_key, set())
                cs = fresh.get((l2, k1, l3))
                new = set()
                if cs:
                    new = f.first(key, rule, as_ldnf((l2, k1, l3), cs)).clauses - old
                    j1_acc[acc_key] = old | new
                vars_ = _j1_vars(pds, nfa, key, l3)
                jn, jo = Ldnf(vars_, frozenset(new)), Ldnf(vars_, frozenset(old))
                for dst in sorted(succ.get((l3, k2), ()), key=label_str):
                    target = produced.setdefault((l, k, dst), set())
                    if new:
                        target.update(f.second(jn, as_ldnf((l3, k2, dst), current[(l3, k2, dst)]), l, k, dst).clauses)
                    a2_new = fresh.get((l3, k2, dst))
                    if a2_new and old:
                        target.update(f.second(jo, as_ldnf((l3, k2, dst), a2_new), l, k, dst).clauses)
        fresh = {}
        for key, cs in produced.items():
            new = cs - current.get(key, set())
            if new:
                fresh[key] = new
        log.debug("saturation pass %d adds %d clauses", iterations, sum(map(len, fresh.values())))
        if not fresh:
            break
        _merge(current, fresh)
        for (src, k, dst) in fresh:
            succ.setdefault((src, k), set()).add(dst)

    delta = {key: as_ldnf(key, cs) for key, cs in current.items() if cs}
    added = {}
    for key, cs in sorted(current.items(), key=lambda kv: tuple(label_str(x) for x in kv[0])):
        extra = len(cs - initial.get(key, frozenset()))
        if extra:
            added[key] = extra
    return SaturationResult(nfa.with_delta(delta), iterations, added)


def _j1_vars(pds: FoPds, nfa: FoNfa, key, l3) -> tuple[str, ...]:
    l, k, l2, k1, k2 = key
    return (
        block("x", pds.locations.dim(l))
        + block("y", pds.alphabet.dim(k))
        + block("v", pds.alphabet.dim(k2))
        + block("w", nfa.states.dim(l3))
    )
