"""How many orbits do tuples of atoms have?

Each orbit of n-tuples is one legal complete clause over n variables, so
counting orbits is counting clauses. For equality atoms that gives the
Bell numbers, for the rationals the ordered Bell numbers, and so on.

Run:  python3 demos/orbits.py [max_width]
"""

import sys
import time

from atomreach import Theory
from atomreach.atoms import get_backend
from atomreach.automata import full_set, orbit_count

BACKENDS = [
    "equality",
    "total_order",
    "equivalence",
    "partial_order",
    "graph",
    "tournament",
    "betweenness",
    "cyclic",
    "wreath(equality,total_order)",
]


def main(max_width=4):
    header = f"{'atoms':<30}" + "".join(f"{n:>8}" for n in range(max_width + 1)) + "   seconds"
    print(header)
    print("-" * len(header))
    for name in BACKENDS:
        t = Theory(get_backend(name), max_width=max_width)
        start = time.perf_counter()
        counts = [len(t.legal_clauses(n)) for n in range(max_width + 1)]
        secs = time.perf_counter() - start
        print(f"{name:<30}" + "".join(f"{c:>8}" for c in counts) + f"   {secs:7.2f}")

    # a definable set made of two components: pairs and triples of rationals
    t = Theory(get_backend("total_order"))
    print("\nQ^2 + Q^3 splits into", orbit_count(full_set(t, {"pairs": 2, "triples": 3})), "orbits")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 4)
