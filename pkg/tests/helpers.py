"""Reference definitions used by several test modules."""

import itertools
from fractions import Fraction

from atomreach import Configuration


def set_partitions(elements):
    """All set partitions of a list, by placing each element in turn."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def weak_orders(n):
    """Count of total preorders on n labelled elements, by brute force."""
    count = 0
    for ranks in itertools.product(range(n), repeat=n):
        used = sorted(set(ranks))
        if used == list(range(len(used))):
            count += 1
    return count


def alternating(word, first_ge):
    """a1 >= a2 <= a3 ... when first_ge, else a1 <= a2 >= a3 ..."""
    ge = first_ge
    for a, b in zip(word, word[1:]):
        if (a < b) if ge else (a > b):
            return False
        ge = not ge
    return True


def in_n(word):
    return len(word) % 2 == 1 and alternating(word, True)


def in_prestar_n(word):
    """Closed form of the predecessors of N under the Mono system."""
    if in_n(word):
        return True
    return len(word) >= 2 and len(word) % 2 == 0 and alternating(word, False)


def stack(*values, letter="k"):
    return tuple((letter, (Fraction(v),)) for v in values)


def mono_config(*values):
    return Configuration("lI", (), stack(*values))


def eval_fo(backend, f, env):
    """Truth of ``f`` over concrete atoms; each quantifier ranges over
    witnesses of every one-point extension type of the current values."""
    from atomreach import formula as fm

    if isinstance(f, fm.Rel):
        return backend.eval_relation(f.name, tuple(env[a] for a in f.args))
    if isinstance(f, fm.Const):
        return f.value
    if isinstance(f, fm.Not):
        return not eval_fo(backend, f.body, env)
    if isinstance(f, fm.And):
        return all(eval_fo(backend, p, env) for p in f.parts)
    if isinstance(f, fm.Or):
        return any(eval_fo(backend, p, env) for p in f.parts)
    values = [v for k, v in env.items() if k != f.var]
    results = (eval_fo(backend, f.body, {**env, f.var: w}) for w in backend.witness_candidates(values))
    return any(results) if isinstance(f, fm.Exists) else all(results)


def random_formula(rng, variables, relations, depth, quantifiers=True):
    """Random formula over binary relations; quantifiers rebind from ``variables``."""
    from atomreach import formula as fm

    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.05:
            return fm.Const(rng.random() < 0.5)
        return fm.Rel(rng.choice(relations), (rng.choice(variables), rng.choice(variables)))
    kinds = ["not", "and", "or"] + (["exists", "forall"] if quantifiers else [])
    kind = rng.choice(kinds)
    if kind == "not":
        return fm.Not(random_formula(rng, variables, relations, depth - 1, quantifiers))
    if kind in ("and", "or"):
        parts = tuple(random_formula(rng, variables, relations, depth - 1, quantifiers) for _ in range(2))
        return fm.And(parts) if kind == "and" else fm.Or(parts)
    body = random_formula(rng, variables, relations, depth - 1, quantifiers)
    return (fm.Exists if kind == "exists" else fm.Forall)(rng.choice(variables), body)
