"""Reachability queries answered through saturation."""

from __future__ import annotations

from typing import Sequence

from .automata import (
    Configuration,
    FoNfa,
    FoPds,
    FoSet,
    block,
    label_str,
    nfa_accepts,
    nfa_nonempty,
    product_nfa,
)
from .errors import AlphabetMismatch, UnknownVariable, VariableMismatch
from .logic import Ldnf, Theory
from .saturation import SaturationResult, saturate

SINK = "_sink"

_SATURATED: dict = {}


def saturated(theory: Theory, pds: FoPds, nfa: FoNfa) -> SaturationResult:
    """Saturation result, computed once per (theory, pds, nfa)."""
    key = (theory, pds, nfa)
    hit = _SATURATED.get(key)
    if hit is None:
        if len(_SATURATED) > 256:
            _SATURATED.clear()
        hit = _SATURATED[key] = saturate(theory, pds, nfa)
    return hit


def prestar_member(theory: Theory, pds: FoPds, nfa: FoNfa, config: Configuration) -> bool:
    """Can ``config`` reach a configuration accepted by ``nfa``?"""
    result = saturated(theory, pds, nfa)
    return nfa_accepts(theory, result.automaton, (config.location, config.state_atoms), config.stack)


def target_automaton(theory: Theory, pds: FoPds, q) -> FoNfa:
    """Automaton accepting {q} x (any stack): q is final and a sink eats the rest."""
    if q not in pds.locations:
        raise UnknownVariable(f"{label_str(q)} is not a location")
    states = dict(pds.locations.components)
    if SINK in states:
        raise VariableMismatch(f"location name {SINK} is reserved")
    states[SINK] = theory.top(())
    gamma = pds.alphabet
    delta = {}
    for k in gamma.labels:
        ny = gamma.dim(k)
        ys = block("y", ny)
        letter = gamma[k].rename(ys)
        delta[(q, k, SINK)] = theory.conjoin(pds.locations[q], letter)
        delta[(SINK, k, SINK)] = letter
    finals = {q: pds.locations[q], SINK: states[SINK]}
    return FoNfa(gamma, FoSet(states), finals, delta)


def reach_decision(
    theory: Theory,
    pds: FoPds,
    p,
    bottom: tuple,
    q,
    state_atoms: Sequence | None = None,
) -> bool:
    """Can ``(p, bottom)`` reach location ``q`` with any stack?

    ``bottom`` is ``(letter, atoms)`` where ``atoms`` may be ``"any"``;
    ``state_atoms=None`` lets the atoms of ``p`` range over its whole set.
    Unconstrained parts are decided on orbits, so no witness atoms are needed.
    """
    letter, atoms = bottom
    if p not in pds.locations:
        raise UnknownVariable(f"{label_str(p)} is not a location")
    if letter not in pds.alphabet:
        raise AlphabetMismatch(f"{label_str(letter)} is not a letter")
    nfa = target_automaton(theory, pds, q)
    b = saturated(theory, pds, nfa).automaton
    any_letter = isinstance(atoms, str) and atoms == "any"
    if state_atoms is not None and not any_letter:
        return nfa_accepts(theory, b, (p, tuple(state_atoms)), [(letter, tuple(atoms))])

    nx, ny = pds.locations.dim(p), pds.alphabet.dim(letter)
    allowed_x = pds.locations[p].clauses
    allowed_y = pds.alphabet[letter].clauses
    if state_atoms is not None:
        if len(state_atoms) != nx:
            raise VariableMismatch(f"location {label_str(p)} expects {nx} atoms")
        allowed_x = {theory.clause_of(tuple(state_atoms))}
    if not any_letter:
        if len(atoms) != ny:
            raise VariableMismatch(f"letter {label_str(letter)} expects {ny} atoms")
        allowed_y = {theory.clause_of(tuple(atoms))}
    xs, ys = list(range(nx)), list(range(nx, nx + ny))
    for dst in b.states.labels:
        d = b.delta.get((p, letter, dst))
        if d is None:
            continue
        nd = b.states.dim(dst)
        ps = list(range(nx + ny, nx + ny + nd))
        finals = b.final(dst).clauses
        for c in d.clauses:
            if c.project(xs) in allowed_x and c.project(ys) in allowed_y and c.project(ps) in finals:
                return True
    return False


def decision_reachability(theory: Theory, pds: FoPds, b: FoNfa, c: FoNfa) -> bool:
    """Is some configuration accepted by ``c`` a predecessor of one accepted by ``b``?"""
    if c.alphabet != pds.alphabet:
        raise AlphabetMismatch("the second automaton reads a different alphabet")
    sat = saturated(theory, pds, b).automaton
    prod = product_nfa(theory, sat, c)
    start = []
    constraints = {}
    for p in pds.locations.labels:
        if p not in c.states or c.states.dim(p) != pds.locations.dim(p):
            continue
        n = pds.locations.dim(p)
        # both copies of the state tuple are equal and lie in the location set
        doubled = frozenset(cl.project(list(range(n)) * 2) for cl in pds.locations[p].clauses)
        start.append((p, p))
        constraints[(p, p)] = Ldnf(block("x", 2 * n), doubled)
    return nfa_nonempty(prod, start, constraints)
