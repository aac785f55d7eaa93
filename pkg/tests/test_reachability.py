import itertools
import random
from fractions import Fraction

import pytest
from helpers import in_n, in_prestar_n, mono_config, stack

from atomreach import EQUALITY, TOTAL_ORDER, Configuration, Theory
from atomreach.automata import FoPds
from atomreach.errors import AlphabetMismatch, UnknownVariable
from atomreach.oracle import ExplicitNfa, FiniteUniverse, explicit_reachable, instantiate_pds
from atomreach.reachability import decision_reachability, prestar_member, reach_decision, target_automaton
from atomreach.specfile import parse_spec

TO = Theory(TOTAL_ORDER)
EQ = Theory(EQUALITY)

GUARDED = """
atoms equality
pds G {
  letter k(1);
  loc p(1);
  loc q(1);
  pop p k -> q : !eq(x1,y1) & eq(p1,y1);
}
"""

MONO_TARGETS = """
nfa Even for Mono {
  state lI(0);
  state o(0);
  state e(0) final;
  trans lI k -> o : true;
  trans o k -> e : true;
  trans e k -> o : true;
}

nfa Never for Mono {
  state lI(0) where false;
  state o(0) final;
  trans lI k -> o : true;
}
"""


@pytest.fixture(scope="module")
def mono_targets(mono_path):
    with open(mono_path) as fh:
        spec = parse_spec(fh.read() + MONO_TARGETS)
    return spec.get_nfa("Even"), spec.get_nfa("Never")


# -- Pre* membership -----------------------------------------------------------


def test_prestar_examples(mono):
    pds, nfa = mono
    assert prestar_member(TO, pds, nfa, mono_config(2, 1, 3))
    assert prestar_member(TO, pds, nfa, mono_config(1, 3))
    assert not prestar_member(TO, pds, nfa, mono_config(3, 1))
    assert not prestar_member(TO, pds, nfa, mono_config())


def test_prestar_matches_closed_form(mono):
    pds, nfa = mono
    for n in range(5):
        for word in itertools.product(range(4), repeat=n):
            assert prestar_member(TO, pds, nfa, mono_config(*word)) == in_prestar_n(word), word


def test_prestar_is_orbit_invariant(mono):
    pds, nfa = mono
    rng = random.Random(3)
    for _ in range(60):
        word = [rng.randrange(5) for _ in range(rng.randint(1, 5))]
        moved = [Fraction(-7, 3) + Fraction(a, 11) for a in word]
        assert prestar_member(TO, pds, nfa, mono_config(*word)) == prestar_member(TO, pds, nfa, mono_config(*moved))


def test_language_is_contained_in_its_predecessors(mono):
    pds, nfa = mono
    for n in range(1, 6, 2):
        for word in itertools.product(range(3), repeat=n):
            if in_n(word):
                assert prestar_member(TO, pds, nfa, mono_config(*word))


def test_one_step_predecessors_are_members(mono):
    pds, nfa = mono
    universe = FiniteUniverse.parse(TOTAL_ORDER, ["0", "1", "2", "3", "4"])
    epds = instantiate_pds(TO, universe, pds)
    start = ("lI", ())
    for n in range(1, 4):
        for word in itertools.product(range(5), repeat=n):
            config = (start, stack(*word))
            member = prestar_member(TO, pds, nfa, mono_config(*word))
            for loc, rest in epds.successors(config):
                if prestar_member(TO, pds, nfa, Configuration(loc[0], loc[1], rest)):
                    assert member, word


# -- location reachability -------------------------------------------------------


def test_location_reaches_itself(mono):
    pds, _ = mono
    assert reach_decision(TO, pds, "lI", ("k", "any"), "lI")
    assert reach_decision(TO, pds, "lI", ("k", (Fraction(1),)), "lI")


def test_no_rules_cannot_move():
    spec = parse_spec(GUARDED)
    g = spec.get_pds("G")
    bare = FoPds(g.alphabet, g.locations, {}, {})
    assert not reach_decision(EQ, bare, "p", ("k", "any"), "q")
    assert reach_decision(EQ, bare, "q", ("k", "any"), "q")


def test_guarded_pop():
    g = parse_spec(GUARDED).get_pds("G")
    assert reach_decision(EQ, g, "p", ("k", "any"), "q")
    assert reach_decision(EQ, g, "p", ("k", (1,)), "q", state_atoms=(0,))
    assert not reach_decision(EQ, g, "p", ("k", (1,)), "q", state_atoms=(1,))
    assert not reach_decision(EQ, g, "q", ("k", "any"), "p")
    # the oracle agrees on a two-atom universe
    universe = FiniteUniverse.parse(EQUALITY, ["#0", "#1"])
    epds = instantiate_pds(EQ, universe, g)
    finals = frozenset(l for l in epds.locations if l[0] == "q")
    target = ExplicitNfa(epds.locations, finals, frozenset())
    witnesses = [
        (x, y) for x in universe.atoms for y in universe.atoms
        if explicit_reachable(epds, target, (("p", (x,)), (("k", (y,)),)), 2)
    ]
    assert witnesses == [(0, 1), (1, 0)]


def test_reach_argument_errors(mono):
    pds, _ = mono
    with pytest.raises(UnknownVariable):
        reach_decision(TO, pds, "nowhere", ("k", "any"), "lI")
    with pytest.raises(AlphabetMismatch):
        reach_decision(TO, pds, "lI", ("m", "any"), "lI")
    with pytest.raises(UnknownVariable):
        target_automaton(TO, pds, "l0")


# -- decision reachability ---------------------------------------------------------


def test_language_reaches_itself(mono):
    pds, nfa = mono
    assert decision_reachability(TO, pds, nfa, nfa)


def test_even_stacks_reach_the_alternating_language(mono, mono_targets):
    pds, nfa = mono
    even, _ = mono_targets
    assert decision_reachability(TO, pds, nfa, even)
    # a concrete witness: k(1) k(2) pushes a letter above 1 and lands in N
    assert prestar_member(TO, pds, nfa, mono_config(1, 2))


def test_unsatisfiable_start_reaches_nothing(mono, mono_targets):
    pds, nfa = mono
    _, never = mono_targets
    assert not decision_reachability(TO, pds, nfa, never)
