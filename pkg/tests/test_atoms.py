import itertools
import random
from fractions import Fraction

import pytest

from atomreach.atoms import (
    BETWEENNESS,
    CYCLIC,
    EQUALITY,
    EQUIVALENCE,
    GRAPH,
    PARTIAL_ORDER,
    TOTAL_ORDER,
    TOURNAMENT,
    FiniteStructure,
    Vocabulary,
    embeds_betweenness,
    embeds_cyclic,
    embeds_equality,
    embeds_equivalence,
    embeds_graph,
    embeds_partial_order,
    embeds_total_order,
    embeds_tournament,
    eval_relation,
    get_backend,
    wreath_embeds,
    wreath_partition,
)
from atomreach.errors import CapabilityUnsupported, VocabularyMismatch
from atomreach.logic import Theory, complete_clause_of

D = FiniteStructure.discrete


def diag(n):
    return [(i, i) for i in range(n)]


def chain(n):
    return [(i, j) for i in range(n) for j in range(n) if i <= j]


# -- vocabulary -------------------------------------------------------------


def test_vocabulary_requires_eq_first():
    with pytest.raises(ValueError):
        Vocabulary((("le", 2), ("eq", 2)))
    with pytest.raises(ValueError):
        Vocabulary((("eq", 2), ("R", 2), ("R", 2)))
    with pytest.raises(ValueError):
        Vocabulary((("eq", 2), ("P", 0)))
    assert Vocabulary.of(le=2).names == ("eq", "le")


# -- per-backend examples ---------------------------------------------------


def test_equality_examples():
    assert embeds_equality(D(3))
    assert not embeds_equality(FiniteStructure.build(2, {"eq": [(0, 0), (1, 1), (0, 1)]}))
    assert embeds_equality(FiniteStructure(0, frozenset()))


def test_total_order_examples():
    assert embeds_total_order(D(3, {"le": chain(3)}))
    assert not embeds_total_order(D(3, {"le": diag(3) + [(0, 1), (1, 2)]}))
    assert not embeds_total_order(D(2, {"le": diag(2)}))


def test_equivalence_examples():
    assert embeds_equivalence(D(3, {"R": diag(3) + [(0, 1), (1, 0)]}))
    assert not embeds_equivalence(D(3, {"R": diag(3) + [(0, 1), (1, 0), (1, 2), (2, 1)]}))
    assert embeds_equivalence(D(1, {"R": [(0, 0)]}))


def test_partial_order_examples():
    assert embeds_partial_order(D(2, {"le": diag(2)}))
    assert embeds_partial_order(D(3, {"le": chain(3)}))
    assert not embeds_partial_order(D(3, {"le": diag(3) + [(0, 1), (1, 2)]}))


def test_graph_examples():
    cycle = [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert embeds_graph(D(4, {"E": cycle + [(j, i) for i, j in cycle]}))
    assert not embeds_graph(D(2, {"E": [(0, 0)]}))
    assert not embeds_graph(D(2, {"E": [(0, 1)]}))


def test_tournament_examples():
    assert embeds_tournament(D(3, {"E": [(0, 1), (1, 2), (2, 0)]}))
    assert not embeds_tournament(D(2, {"E": [(0, 1), (1, 0)]}))
    assert not embeds_tournament(D(2))


def test_betweenness_examples():
    assert embeds_betweenness(D(3, {"B": [(1, 0, 2), (1, 2, 0)]}))
    assert not embeds_betweenness(D(3, {"B": [(0, 1, 2), (1, 0, 2)]}))
    assert embeds_betweenness(D(1))
    assert embeds_betweenness(D(0))


def test_cyclic_examples():
    assert embeds_cyclic(D(3, {"K": [(0, 1, 2), (2, 0, 1), (1, 2, 0)]}))
    assert not embeds_cyclic(D(3, {"K": [(0, 1, 2), (0, 2, 1)]}))
    assert embeds_cyclic(D(2))


def _order_relation(order, kind):
    pos = {e: i for i, e in enumerate(order)}
    n = len(order)
    out = set()
    for x, y, z in itertools.product(range(n), repeat=3):
        if len({x, y, z}) < 3:
            continue
        a, b, c = pos[x], pos[y], pos[z]
        if kind == "B" and (b < a < c or c < a < b):
            out.add((x, y, z))
        if kind == "K" and (a < b < c or c < a < b or b < c < a):
            out.add((x, y, z))
    return out


@pytest.mark.parametrize("kind,backend", [("B", BETWEENNESS), ("K", CYCLIC)])
def test_order_shadows_match_brute_force(kind, backend):
    n = 4
    triples = [t for t in itertools.product(range(n), repeat=3) if len(set(t)) == 3]
    induced = {frozenset(_order_relation(p, kind)) for p in itertools.permutations(range(n))}
    for rel in induced:
        assert backend.embeds(D(n, {kind: rel}))
    rng = random.Random(7)
    for _ in range(300):
        rel = frozenset(t for t in triples if rng.random() < 0.3)
        assert backend.embeds(D(n, {kind: rel})) == (rel in induced)


def test_wreath_examples():
    ww = get_backend("wreath(equality,equality)")
    assert ww.vocabulary.names == ("eq", "eq_a")
    assert wreath_embeds(EQUALITY, EQUALITY, FiniteStructure(0, frozenset()))
    # 0 and 1 share a block but sit on opposite sides of 2 in A
    wo = get_backend("wreath(total_order,total_order)")
    assert wo.vocabulary.names == ("eq", "eq_a", "le_a", "le_b")
    s = D(3, {
        "eq_a": diag(3) + [(0, 1), (1, 0)],
        "le_a": diag(3) + [(0, 1), (1, 0), (0, 2), (2, 1)],
        "le_b": diag(3) + [(0, 1)],
    })
    assert not wo.embeds(s)
    assert wreath_partition(TOTAL_ORDER, TOTAL_ORDER, s) is None
    ok = D(3, {
        "eq_a": diag(3) + [(0, 1), (1, 0)],
        "le_a": diag(3) + [(0, 1), (1, 0), (0, 2), (1, 2)],
        "le_b": diag(3) + [(0, 1)],
    })
    assert wo.embeds(ok)
    assert wreath_partition(TOTAL_ORDER, TOTAL_ORDER, ok) == [0, 0, 1]


def test_wreath_equality_equality_is_equivalence_small():
    ww = get_backend("wreath(equality,equality)")
    for n in range(4):
        pairs = list(itertools.product(range(n), repeat=2))
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rel = [p for p, b in zip(pairs, bits) if b]
            assert ww.embeds(D(n, {"eq_a": rel})) == EQUIVALENCE.embeds(D(n, {"R": rel}))


def test_nested_wreath_names():
    b = get_backend("wreath(wreath(equality,equality),total_order)")
    assert b.vocabulary.names == ("eq", "eq_a", "eq_a_a", "le_b")
    with pytest.raises(ValueError):
        get_backend("wreath(equality)")
    with pytest.raises(ValueError):
        get_backend("rationals")


def test_vocabulary_mismatch():
    with pytest.raises(VocabularyMismatch):
        embeds_total_order(D(2, {"E": [(0, 1)]}))
    with pytest.raises(VocabularyMismatch):
        embeds_equality(D(2, {"le": [(0, 1)]}))


# -- concrete models ----------------------------------------------------------


def test_eval_relation_examples():
    assert eval_relation(TOTAL_ORDER, "le", (Fraction(1, 2), Fraction(2, 3)))
    assert eval_relation(GRAPH, "E", (0, 1))
    assert not eval_relation(GRAPH, "E", (0, 2))
    assert eval_relation(GRAPH, "E", (1, 3))
    assert eval_relation(EQUIVALENCE, "R", ((3, 1), (3, 9)))
    assert not eval_relation(EQUIVALENCE, "eq", ((3, 1), (3, 9)))
    for b in (PARTIAL_ORDER, TOURNAMENT, BETWEENNESS, CYCLIC):
        with pytest.raises(CapabilityUnsupported):
            eval_relation(b, "eq", (0, 0))


def test_wreath_model():
    b = get_backend("wreath(equality,total_order)")
    x, y, z = b.parse_atom("(#1|1/2)"), b.parse_atom("(#1|3)"), b.parse_atom("(#2|0)")
    assert x == (1, Fraction(1, 2))
    assert b.format_atom(x) == "(#1|1/2)"
    assert b.eval_relation("eq_a", (x, y))
    assert b.eval_relation("le_b", (x, y))
    assert not b.eval_relation("le_b", (z, x))
    assert not b.eval_relation("eq", (x, y))


def test_rationals_are_exact_and_reduced():
    q = TOTAL_ORDER.parse_atom("6/4")
    assert q == Fraction(3, 2) and q.denominator == 2
    assert TOTAL_ORDER.format_atom(TOTAL_ORDER.parse_atom("-8/4")) == "-2"
    assert TOTAL_ORDER.parse_atom("5") == 5


def test_atom_syntax_errors():
    with pytest.raises(ValueError):
        EQUALITY.parse_atom("#-1")
    with pytest.raises(ValueError):
        EQUIVALENCE.parse_atom("3")
    with pytest.raises(ValueError):
        get_backend("wreath(equality,equality)").parse_atom("#1|#2")


def test_complete_clause_of_examples():
    t = Theory(TOTAL_ORDER)
    c = complete_clause_of(TOTAL_ORDER, (3, 3, 5))
    assert c.classes == (0, 0, 1)
    assert c.holds("eq", (0, 1)) and c.holds("le", (0, 2)) and not c.holds("le", (2, 0))
    assert complete_clause_of(EQUALITY, (7, 7)).classes == (0, 0)
    lt = complete_clause_of(TOTAL_ORDER, (Fraction(1, 2), Fraction(2, 3)))
    assert lt in t.legal_clauses(2) and len(t.legal_clauses(2)) == 3
    assert lt.classes == (0, 1) and lt.holds("le", (0, 1)) and not lt.holds("le", (1, 0))
    with pytest.raises(CapabilityUnsupported):
        complete_clause_of(TOURNAMENT, (0, 1))


# -- properties ---------------------------------------------------------------

ALL = [
    EQUALITY, TOTAL_ORDER, EQUIVALENCE, PARTIAL_ORDER, GRAPH, TOURNAMENT, BETWEENNESS, CYCLIC,
    get_backend("wreath(equality,total_order)"),
]


@pytest.mark.parametrize("backend", ALL, ids=lambda b: b.name)
def test_downward_closure(backend):
    """Every embeddable structure of size <= 4 has only embeddable restrictions."""
    t = Theory(backend)
    for n in range(5):
        for c in t.legal_clauses(n):
            if c.size != n:
                continue
            s = c.structure()
            assert backend.embeds(s)
            for k in range(n):
                for sub in itertools.combinations(range(n), k):
                    assert backend.embeds(s.restrict(sub))
    assert backend.embeds(FiniteStructure(0, frozenset()))


@pytest.mark.parametrize(
    "backend",
    [EQUALITY, TOTAL_ORDER, EQUIVALENCE, GRAPH, get_backend("wreath(equality,total_order)")],
    ids=lambda b: b.name,
)
def test_model_soundness(backend):
    t = Theory(backend)
    sample = backend.sample()
    for n in range(5):
        for atoms in itertools.product(sample, repeat=n):
            c = t.clause_of(atoms)
            assert backend.embeds(c.structure())


@pytest.mark.parametrize("backend", [EQUALITY, TOTAL_ORDER, EQUIVALENCE, GRAPH], ids=lambda b: b.name)
def test_witness_candidates_cover_every_one_point_type(backend):
    t = Theory(backend)
    for values in itertools.product(backend.sample()[:3], repeat=2):
        base = t.clause_of(values)
        reached = {t.clause_of(values + (w,)) for w in backend.witness_candidates(list(values))}
        assert reached == set(t.extend_clause(base, 1))


def test_extensions_are_extensions():
    for backend in ALL:
        s = Theory(backend).legal_clauses(1)[0].structure()
        for e in backend.extensions(s):
            assert e.size == 2 and e.restrict([0]) == s
