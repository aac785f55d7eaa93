import itertools
import random
from fractions import Fraction

import pytest
from helpers import eval_fo, random_formula, set_partitions, weak_orders
from hypothesis import given, settings
from hypothesis import strategies as st

from atomreach.atoms import (
    EQUALITY,
    EQUIVALENCE,
    GRAPH,
    PARTIAL_ORDER,
    TOTAL_ORDER,
    TOURNAMENT,
    BETWEENNESS,
    CYCLIC,
    FiniteStructure,
    get_backend,
)
from atomreach.errors import (
    InconsistentClause,
    MalformedClause,
    UnknownVariable,
    VariableMismatch,
    WidthExceeded,
)
from atomreach.formula import parse_formula, quantifier_depth
from atomreach.logic import (
    Clause,
    Ldnf,
    Literal,
    Theory,
    clause_consistent,
    clause_from_literals,
    clause_to_structure,
    complete_clause_of,
    eliminate_exists,
    enumerate_legal_clauses,
    fo_to_ldnf,
    is_legal,
    ldnf_entails,
    ldnf_false,
    ldnf_true,
    ldnf_union,
    qf_to_ldnf,
    satisfiable,
)

TO = Theory(TOTAL_ORDER)
EQ = Theory(EQUALITY)
V = TOTAL_ORDER.vocabulary


def complete(vocab, variables, positive):
    """Complete literal set: the listed literals positive, all others negative."""
    positive = {(r, tuple(a)) for r, a in positive}
    out = []
    for rel, arity in vocab.relations:
        for args in itertools.product(variables, repeat=arity):
            out.append(Literal(rel, args, (rel, args) in positive))
    return out


def refl(variables, rels=("eq", "le")):
    return [(r, (v, v)) for v in variables for r in rels]


def L(text, variables, t=TO):
    return t.normalize(parse_formula(text, t.backend), variables)


# -- clauses ------------------------------------------------------------------


def test_clause_consistent_examples():
    xy = ("x", "y")
    bad = complete(V, xy, refl(xy) + [("eq", "xy"), ("eq", "yx"), ("le", "xy")])
    assert not clause_consistent(V, xy, bad)
    lt = complete(V, xy, refl(xy) + [("le", "xy")])
    assert clause_consistent(V, xy, lt)
    asym = complete(V, xy, refl(xy) + [("eq", "xy"), ("le", "xy"), ("le", "yx")])
    assert not clause_consistent(V, xy, asym)


def test_incomplete_and_contradictory_literal_sets():
    lits = complete(V, ("x", "y"), refl("xy"))[:-1]
    with pytest.raises(MalformedClause):
        clause_consistent(V, ("x", "y"), lits)
    lits = complete(V, ("x",), refl("x")) + [Literal("le", ("x", "x"), False)]
    with pytest.raises(MalformedClause):
        clause_consistent(V, ("x",), lits)
    with pytest.raises(MalformedClause):
        clause_consistent(V, ("x",), complete(V, ("x", "z"), refl("xz")))


def test_clause_from_literals_and_structure():
    xy = ("x", "y")
    c = clause_from_literals(V, xy, complete(V, xy, refl(xy) + [("le", "xy")]))
    s = clause_to_structure(c)
    assert s == FiniteStructure.discrete(2, {"le": [(0, 0), (1, 1), (0, 1)]})
    same = clause_from_literals(V, xy, complete(V, xy, refl(xy) + [("eq", "xy"), ("eq", "yx"), ("le", "xy"), ("le", "yx")]))
    assert same.classes == (0, 0) and clause_to_structure(same).size == 1
    assert clause_to_structure(Clause(())).size == 0
    bad = complete(V, xy, refl(xy) + [("eq", "xy"), ("le", "xy")])
    with pytest.raises(InconsistentClause):
        clause_from_literals(V, xy, bad)


def test_clause_literals_round_trip():
    for c in TO.legal_clauses(3):
        lits = c.literals(V, ("a", "b", "c"))
        assert clause_from_literals(V, ("a", "b", "c"), lits) == c


def test_is_legal_examples():
    xyz = ("x", "y", "z")
    not_total = clause_from_literals(V, xyz, complete(V, xyz, refl(xyz) + [("le", "xy"), ("le", "yz")]))
    assert not is_legal(TOTAL_ORDER, not_total)
    lt = complete_clause_of(TOTAL_ORDER, (0, 1))
    assert is_legal(TOTAL_ORDER, lt)
    for n in range(4):
        for part in set_partitions(range(n)):
            classes = [next(i for i, b in enumerate(part) if v in b) for v in range(n)]
            assert is_legal(EQUALITY, Clause.from_structure(classes, FiniteStructure.discrete(len(part))))


# -- enumeration -------------------------------------------------------------


def test_enumeration_examples():
    assert len(enumerate_legal_clauses(TOTAL_ORDER, ("x", "y"))) == 3
    assert len(enumerate_legal_clauses(EQUALITY, ("x", "y", "z"))) == 5
    assert len(enumerate_legal_clauses(TOTAL_ORDER, ("x", "y", "z"))) == 13
    assert weak_orders(3) == 13


@pytest.mark.parametrize("n", range(6))
def test_counts_against_independent_formulas(n):
    assert len(EQ.legal_clauses(n)) == sum(1 for _ in set_partitions(range(n)))
    if n <= 5:
        assert len(TO.legal_clauses(n)) == weak_orders(n)


@pytest.mark.parametrize(
    "backend,limit",
    [
        (EQUALITY, 4), (TOTAL_ORDER, 3), (EQUIVALENCE, 3), (PARTIAL_ORDER, 3), (GRAPH, 3),
        (TOURNAMENT, 3), (BETWEENNESS, 2), (CYCLIC, 2), (get_backend("wreath(equality,equality)"), 3),
        (get_backend("wreath(equality,total_order)"), 2),
    ],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_incremental_enumeration_matches_reference(backend, limit):
    t = Theory(backend)
    for n in range(limit + 1):
        assert t.legal_clauses(n) == t.legal_clauses_naive(n)


def test_known_counts_for_other_backends():
    counts = {
        EQUIVALENCE: [1, 1, 3, 12],
        PARTIAL_ORDER: [1, 1, 4, 29],
        GRAPH: [1, 1, 3, 15, 127],
        TOURNAMENT: [1, 1, 3, 15, 127],
        BETWEENNESS: [1, 1, 2, 7, 38],
        CYCLIC: [1, 1, 2, 6, 26],
    }
    for backend, expected in counts.items():
        t = Theory(backend)
        assert [len(t.legal_clauses(n)) for n in range(len(expected))] == expected


def test_width_budget():
    small = Theory(TOTAL_ORDER, max_width=2)
    with pytest.raises(WidthExceeded):
        small.legal_clauses(3)
    with pytest.raises(WidthExceeded):
        small.normalize(parse_formula("le(x,y) & le(y,z)"))
    with pytest.raises(WidthExceeded):
        enumerate_legal_clauses(TOTAL_ORDER, [f"v{i}" for i in range(9)])


# -- normalization -------------------------------------------------------------


def test_qf_to_ldnf_examples():
    d = qf_to_ldnf(TOTAL_ORDER, parse_formula("le(x,y)"))
    assert d.variables == ("x", "y") and len(d) == 2
    assert d.clauses == {complete_clause_of(TOTAL_ORDER, (0, 1)), complete_clause_of(TOTAL_ORDER, (0, 0))}
    t = qf_to_ldnf(TOTAL_ORDER, parse_formula("true"))
    assert t == ldnf_true() and t.clauses == {Clause(())}
    assert qf_to_ldnf(TOTAL_ORDER, parse_formula("le(x,y) & !le(x,y)")).is_empty()
    with pytest.raises(ValueError):
        qf_to_ldnf(TOTAL_ORDER, parse_formula("exists z. le(x,z)"))


def test_eliminate_exists_examples():
    d = L("eq(x,y) & le(y,x2)", ("x", "y", "x2"))
    assert eliminate_exists(TOTAL_ORDER, "x2", d) == L("eq(x,y)", ("x", "y"))
    loose = L("le(x,y)", ("x", "y", "w"))
    assert eliminate_exists(TOTAL_ORDER, "w", loose) == L("le(x,y)", ("x", "y"))
    assert eliminate_exists(TOTAL_ORDER, "x", ldnf_false(("x", "y"))) == ldnf_false(("y",))
    with pytest.raises(UnknownVariable):
        eliminate_exists(TOTAL_ORDER, "q", d)


FIRST = "exists y1, y2, x3. (lt(y,y1) & eq(y2,y)) & le(x3,y1) & (eq(x3,y2) & ge(x2,y2))"
SECOND = "exists y1, y2, x3. (lt(y,y1) & eq(y2,y)) & ge(x3,y1) & (eq(x3,y2) & le(x2,y2))"


def test_fo_to_ldnf_worked_eliminations():
    first = fo_to_ldnf(TOTAL_ORDER, parse_formula(FIRST, TOTAL_ORDER), ("y", "x2"))
    assert first == L("ge(x2,y)", ("y", "x2"))
    assert first.clauses == {complete_clause_of(TOTAL_ORDER, (0, 1)), complete_clause_of(TOTAL_ORDER, (0, 0))}
    second = fo_to_ldnf(TOTAL_ORDER, parse_formula(SECOND, TOTAL_ORDER), ("y", "x2"))
    assert second.is_empty() and second.variables == ("y", "x2")
    assert fo_to_ldnf(TOTAL_ORDER, parse_formula("forall x. eq(x,x)")) == ldnf_true()


def test_density_and_unboundedness():
    assert L("exists z. lt(x,z) & lt(z,y)", ("x", "y")) == L("lt(x,y)", ("x", "y"))
    assert L("forall z. le(x,z) | le(z,y)", ("x", "y")) == L("le(x,y)", ("x", "y"))
    assert L("exists z. lt(z,x)", ("x",)) == TO.top(("x",))
    assert L("exists x. forall y. le(x,y)", ()).is_empty()


def test_satisfiable_examples():
    assert not satisfiable(TOTAL_ORDER, parse_formula("lt(x,y) & lt(y,x)", TOTAL_ORDER))
    assert not satisfiable(TOTAL_ORDER, parse_formula(SECOND, TOTAL_ORDER))
    assert satisfiable(EQUALITY, parse_formula("!eq(x,y) & !eq(y,z) & !eq(x,z)"))


def test_free_variable_outside_list():
    with pytest.raises(UnknownVariable):
        TO.normalize(parse_formula("le(x,y)"), ("x",))


# -- ldnf algebra --------------------------------------------------------------


def test_entails_and_union_examples():
    xy = ("x", "y")
    lt, eq = L("lt(x,y)", xy), L("eq(x,y)", xy)
    le = L("le(x,y)", xy)
    assert ldnf_entails(lt, le)
    assert not ldnf_entails(eq, lt)
    assert ldnf_entails(ldnf_false(xy), lt)
    assert ldnf_union(lt, eq) == le
    assert ldnf_union(lt, ldnf_false(xy)) == lt
    assert ldnf_union(lt, lt) == lt
    with pytest.raises(VariableMismatch):
        ldnf_union(lt, L("lt(x,z)", ("x", "z")))
    with pytest.raises(VariableMismatch):
        ldnf_entails(lt, lt.rename(("y", "x")))


def test_entailment_is_a_partial_order_with_union_as_join():
    rng = random.Random(3)
    top = TO.legal_clauses(3)
    sets = [Ldnf(("a", "b", "c"), frozenset(rng.sample(top, rng.randint(0, 6)))) for _ in range(25)]
    for a, b in itertools.product(sets, repeat=2):
        j = ldnf_union(a, b)
        assert ldnf_entails(a, j) and ldnf_entails(b, j)
        if ldnf_entails(a, b) and ldnf_entails(b, a):
            assert a == b
        for c in sets:
            if ldnf_entails(a, c) and ldnf_entails(b, c):
                assert ldnf_entails(j, c)


@pytest.mark.parametrize("backend", [EQUALITY, TOTAL_ORDER, EQUIVALENCE, GRAPH], ids=lambda b: b.name)
def test_double_complement(backend):
    t = Theory(backend)
    rng = random.Random(5)
    for n in range(4):
        top = t.legal_clauses(n)
        for _ in range(10):
            d = Ldnf(tuple(f"v{i}" for i in range(n)), frozenset(c for c in top if rng.random() < 0.4))
            assert t.complement(t.complement(d)) == d


def test_elimination_shrinks_and_stays_legal():
    rng = random.Random(11)
    top = TO.legal_clauses(3)
    for _ in range(30):
        d = Ldnf(("a", "b", "c"), frozenset(rng.sample(top, rng.randint(0, len(top)))))
        for v in "abc":
            e = eliminate_exists(TOTAL_ORDER, v, d)
            assert len(e) <= len(d)
            assert all(TO.is_legal(c) for c in e.clauses)


@pytest.mark.parametrize("backend", [TOTAL_ORDER, GRAPH, EQUIVALENCE], ids=lambda b: b.name)
def test_conjoin_matches_cylindrify_and_intersect(backend):
    t = Theory(backend)
    rng = random.Random(17)
    top = t.legal_clauses(2)
    for _ in range(20):
        a = Ldnf(("x", "y"), frozenset(c for c in top if rng.random() < 0.5))
        b = Ldnf(("y", "z"), frozenset(c for c in top if rng.random() < 0.5))
        expected = t.extend(a, ("z",)).intersection(t.align(b, ("x", "y", "z")))
        assert t.conjoin(a, b) == expected


def test_substitute_identifies_variables():
    d = L("le(x,y)", ("x", "y", "z"))
    assert d.substitute({"z": "x"}) == L("le(x,y)", ("x", "y"))
    assert L("lt(x,y)", ("x", "y")).substitute({"y": "x"}).is_empty()


def test_rendering_normalizes_back():
    for backend in (TOTAL_ORDER, GRAPH, EQUIVALENCE, get_backend("wreath(equality,total_order)")):
        t = Theory(backend)
        for c in t.legal_clauses(3):
            d = Ldnf(("a", "b", "c"), frozenset({c}))
            assert t.normalize(t.render(d), d.variables) == d
            assert t.normalize(d.to_formula(backend.vocabulary), d.variables) == d
    assert str(TO.render(L("le(y1,p1)", ("y1", "p1")))) == "eq(y1,p1) | (!eq(y1,p1) & le(y1,p1))"


# -- semantics -----------------------------------------------------------------

# small witness samples: every sample tuple must realize a legal clause
WITNESS = {
    EQUALITY: [0, 1, 2],
    TOTAL_ORDER: [Fraction(i) for i in range(3)],
    EQUIVALENCE: [(0, 0), (0, 1), (1, 0)],
    GRAPH: [0, 1, 2, 3],
}
# samples that realize every clause of width <= 3 (the small equivalence and
# graph samples above miss three pairwise unrelated atoms)
COVERING = {
    EQUALITY: [0, 1, 2],
    TOTAL_ORDER: [Fraction(i) for i in range(3)],
    EQUIVALENCE: [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)],
    GRAPH: list(range(6)),
}


@pytest.mark.parametrize("backend", list(WITNESS), ids=lambda b: b.name)
def test_sample_tuples_realize_legal_clauses(backend):
    t = Theory(backend)
    for n in range(4):
        legal = set(t.legal_clauses(n))
        for atoms in itertools.product(WITNESS[backend], repeat=n):
            c = complete_clause_of(backend, atoms)
            assert t.is_legal(c) and c in legal


@pytest.mark.parametrize("backend", list(COVERING), ids=lambda b: b.name)
def test_every_legal_clause_is_realized(backend):
    t = Theory(backend)
    for n in range(4):
        realized = {t.clause_of(atoms) for atoms in itertools.product(COVERING[backend], repeat=n)}
        assert realized == set(t.legal_clauses(n))


RELATIONS = {EQUALITY: ["eq"], TOTAL_ORDER: ["eq", "le"], EQUIVALENCE: ["eq", "R"], GRAPH: ["eq", "E"]}


@pytest.mark.parametrize("backend", list(RELATIONS), ids=lambda b: b.name)
def test_normalization_preserves_meaning(backend):
    t = Theory(backend)
    rng = random.Random(backend.name)
    for _ in range(40):
        f = random_formula(rng, ["x", "y", "z"], RELATIONS[backend], 4)
        d = t.normalize(f)
        free = d.variables
        sample = backend.sample()[: len(free) + quantifier_depth(f) + 1]
        for atoms in itertools.product(sample, repeat=len(free)):
            assert eval_fo(backend, f, dict(zip(free, atoms))) == (t.clause_of(atoms) in d.clauses)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_compositional_and_prenex_normalization_agree(seed):
    rng = random.Random(seed)
    backend = rng.choice([EQUALITY, TOTAL_ORDER, EQUIVALENCE, GRAPH, PARTIAL_ORDER])
    t = Theory(backend)
    rels = ["eq"] + [r for r, _ in backend.vocabulary.proper]
    f = random_formula(rng, ["x", "y", "z"], rels, 3)
    assert t.normalize(f) == t.normalize_prenex(f)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_quantifier_free_normalization_matches_enumeration(seed):
    rng = random.Random(seed)
    t = rng.choice([TO, EQ, Theory(TOURNAMENT)])
    rels = ["eq"] + [r for r, _ in t.vocabulary.proper]
    f = random_formula(rng, ["x", "y", "z"], rels, 4, quantifiers=False)
    assert t.normalize(f) == t.qf_enumerate(f)
