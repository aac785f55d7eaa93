"""Saturation time with the width held at 2.

Every state carries one rational and every letter none, so all transition
and rule formulas have two variables. Only the number of locations, states
and rules grows. The log-log slope of the median time estimates the
polynomial degree.

Run:  python3 demos/scaling.py
"""

import math
import random
import statistics
import time

from atomreach import TOTAL_ORDER, Theory
from atomreach.errors import ValidationError
from atomreach.generate import InstanceShape, random_instance
from atomreach.saturation import saturate


def shape(n, state_dim=1):
    return InstanceShape(
        letters=2, locations=n // 2, extra_states=n - n // 2,
        state_dims=(state_dim,), letter_dims=(0,),
        push_rules=n, pop_rules=n, transitions=2 * n,
    )


def median_time(n, seeds=5):
    times, added = [], []
    for seed in range(seeds):
        t = Theory(TOTAL_ORDER)
        pds, nfa = random_instance(t, random.Random(seed), shape(n))
        start = time.perf_counter()
        result = saturate(t, pds, nfa)
        times.append(time.perf_counter() - start)
        added.append(result.total_added)
    return statistics.median(times), statistics.median(added)


def main():
    print(f"{'components':>10} {'median s':>10} {'clauses added':>14}")
    xs, ys = [], []
    for n in range(2, 21, 2):
        secs, added = median_time(n)
        xs.append(math.log(n))
        ys.append(math.log(secs))
        print(f"{n:>10} {secs:>10.4f} {added:>14}")
    slope = statistics.linear_regression(xs, ys).slope
    print(f"log-log slope: {slope:.2f}")

    # clause counts grow exponentially with width, so the budget is checked
    # before any work starts
    t = Theory(TOTAL_ORDER)
    pds, nfa = random_instance(t, random.Random(0), shape(6, state_dim=3))
    try:
        saturate(t, pds, nfa)
    except ValidationError as e:
        print(f"\nwith states of dimension 3 and the default budget of {t.max_width}:")
        print(e)


if __name__ == "__main__":
    main()
