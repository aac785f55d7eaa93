"""Random definable pushdown systems and automata, for testing and benchmarks.

Every rule and transition is a union of a few random legal clauses, so the
instances stay sparse regardless of how wide the rules are.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .automata import FoNfa, FoPds, FoSet, block
from .logic import Clause, Ldnf, Theory


def random_clause(theory: Theory, n: int, rng: random.Random, reuse: float = 0.3) -> Clause:
    """A legal clause over ``n`` variables, grown one variable at a time."""
    s = Clause(()).structure()
    classes: list[int] = []
    for _ in range(n):
        if s.size and rng.random() < reuse:
            classes.append(rng.randrange(s.size))
            continue
        exts = theory.extensions(s)
        s = rng.choice(exts)
        classes.append(s.size - 1)
    return Clause.from_structure(classes, s)


def random_ldnf(theory: Theory, variables, rng: random.Random, max_clauses: int = 2) -> Ldnf:
    variables = tuple(variables)
    count = rng.randint(1, max_clauses)
    return Ldnf(variables, frozenset(random_clause(theory, len(variables), rng) for _ in range(count)))


@dataclass(frozen=True)
class InstanceShape:
    letters: int = 2
    locations: int = 2
    extra_states: int = 2
    state_dims: tuple[int, ...] = (0, 1, 2)
    letter_dims: tuple[int, ...] = (0, 1)
    push_rules: int = 3
    pop_rules: int = 2
    transitions: int = 4
    max_clauses: int = 2


def random_instance(theory: Theory, rng: random.Random, shape: InstanceShape = InstanceShape()) -> tuple[FoPds, FoNfa]:
    """A random pushdown system with a valid automaton for it.

    Components are unconstrained, finals are either whole components or
    random clauses, and transitions never enter a location.
    """
    letters = {f"k{i}": theory.top(block("x", rng.choice(shape.letter_dims))) for i in range(shape.letters)}
    locs = {f"p{i}": theory.top(block("x", rng.choice(shape.state_dims))) for i in range(shape.locations)}
    extra = {f"q{i}": theory.top(block("x", rng.choice(shape.state_dims))) for i in range(shape.extra_states)}
    gamma, locations = FoSet(letters), FoSet(locs)
    states = FoSet({**locs, **extra})

    push = {}
    for _ in range(shape.push_rules):
        l, l2 = rng.choice(list(locs)), rng.choice(list(locs))
        k, k1, k2 = (rng.choice(list(letters)) for _ in range(3))
        variables = (
            block("x", locations.dim(l)) + block("y", gamma.dim(k)) + block("p", locations.dim(l2))
            + block("u", gamma.dim(k1)) + block("v", gamma.dim(k2))
        )
        push[(l, k, l2, k1, k2)] = random_ldnf(theory, variables, rng, shape.max_clauses)
    pop = {}
    for _ in range(shape.pop_rules):
        l, l2, k = rng.choice(list(locs)), rng.choice(list(locs)), rng.choice(list(letters))
        variables = block("x", locations.dim(l)) + block("y", gamma.dim(k)) + block("p", locations.dim(l2))
        pop[(l, k, l2)] = random_ldnf(theory, variables, rng, shape.max_clauses)
    pds = FoPds(gamma, locations, push, pop)

    targets = list(extra)
    delta = {}
    if targets:
        for _ in range(shape.transitions):
            src, dst, k = rng.choice(list(states.labels)), rng.choice(targets), rng.choice(list(letters))
            variables = block("x", states.dim(src)) + block("y", gamma.dim(k)) + block("p", states.dim(dst))
            d = random_ldnf(theory, variables, rng, shape.max_clauses)
            delta[(src, k, dst)] = delta[(src, k, dst)].union(d) if (src, k, dst) in delta else d
    finals = {}
    for label in states.labels:
        roll = rng.random()
        if roll < 0.4:
            finals[label] = states[label]
        elif roll < 0.7:
            finals[label] = random_ldnf(theory, block("x", states.dim(label)), rng, shape.max_clauses)
    return pds, FoNfa(gamma, states, finals, delta)
