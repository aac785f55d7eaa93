"""Saturating a one-letter pushdown system over the rationals.

The system in mono.spec has one location lI and one letter k carrying a
rational. Its only rule pops k(y) and pushes k(u) k(y) with u > y, so the
stack grows by a strictly larger letter on top. The automaton A accepts
stacks a1 >= a2 <= a3 >= ... of odd length.

Run:  python3 demos/worked_example.py
"""

from pathlib import Path

from atomreach import TOTAL_ORDER, Configuration, Theory
from atomreach.reachability import prestar_member
from atomreach.saturation import forced, saturate
from atomreach.specfile import load, nfa_text

HERE = Path(__file__).resolve().parent


def show(theory, d):
    return " | ".join(str(theory.render_clause(c, d.variables)) for c in d.sorted_clauses()) or "(empty)"


def main():
    spec = load(str(HERE / "mono.spec"))
    pds, nfa = spec.get_pds("Mono"), spec.get_nfa("A")
    t = Theory(TOTAL_ORDER)

    print("input automaton:")
    print(nfa_text(t, "A", "Mono", nfa))

    # One push step followed by two transitions of A forces a new transition
    # out of lI. Printing the forced set directly shows what the first pass adds.
    print("\nforced by the first pass:")
    for key, d in forced(t, pds, nfa).items():
        print(f"  {key}: {show(t, d)}")

    result = saturate(t, pds, nfa)
    print(f"\nsaturation stops after {result.iterations} passes, adding {result.total_added} clauses")
    for key, n in result.added_clauses.items():
        print(f"  {key}: {n} clauses, now {show(t, result.automaton.delta[key])}")

    # The saturated automaton accepts every stack that can grow into an
    # accepted one: odd alternating stacks, plus even ones b1 <= b2 >= ...
    print("\nmembership in the predecessors of L(A):")
    for word in [(2, 1, 3), (1, 3), (3, 1), (5,), (0, 0), (1, 2, 2, 3)]:
        config = Configuration("lI", (), tuple(("k", (TOTAL_ORDER.parse_atom(str(a)),)) for a in word))
        print(f"  {str(config):<28} {prestar_member(t, pds, nfa, config)}")


if __name__ == "__main__":
    main()
