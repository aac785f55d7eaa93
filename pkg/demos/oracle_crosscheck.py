"""Checking symbolic saturation against brute force on a finite universe.

Restricting every definable set to a handful of atoms turns the system into
an ordinary finite pushdown system, which the textbook algorithm saturates
directly. Anything the finite system can do, the infinite one can do too,
so every explicit member of Pre* has to be a symbolic member as well.

Run:  python3 demos/oracle_crosscheck.py [instances]
"""

import random
import sys
import time
from pathlib import Path

from atomreach import EQUALITY, TOTAL_ORDER, Theory
from atomreach.generate import InstanceShape, random_instance
from atomreach.oracle import FiniteUniverse, cross_check
from atomreach.specfile import load

HERE = Path(__file__).resolve().parent


def main(instances=20):
    spec = load(str(HERE / "mono.spec"))
    t = Theory(TOTAL_ORDER)
    universe = FiniteUniverse.parse(TOTAL_ORDER, ["0", "1", "2", "3"])
    report = cross_check(t, universe, spec.get_pds("Mono"), spec.get_nfa("A"), 4)
    print("Mono over {0,1,2,3}, stacks up to 4 letters")
    print(report.summary())

    print(f"\n{instances} random instances per backend, universe of 4 atoms, stack bound 3")
    for backend in (EQUALITY, TOTAL_ORDER):
        t = Theory(backend, max_width=12)
        universe = FiniteUniverse.of_size(backend, 4)
        bad = checked = 0
        start = time.perf_counter()
        for seed in range(instances):
            pds, nfa = random_instance(t, random.Random(seed), InstanceShape(letter_dims=(0, 1, 2)))
            r = cross_check(t, universe, pds, nfa, 3)
            checked += r.checked
            bad += not r.ok
        secs = time.perf_counter() - start
        print(f"  {backend.name:<12} {checked:>10} configurations, {bad} failing instances, {secs:.1f}s")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
