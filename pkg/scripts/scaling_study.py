"""Cost-vs-N sweep for the three named resource families.

Prints a table of minimum joint costs plus fitted log-log slopes over the
upper half of the range, where the asymptotic power law has settled.
"""
import argparse
import math

import numpy as np

from framesync import (flat_state, likelihood_cost, min_joint_cost,
                       optimal_frameness_state, sine_state, variance_cost)

FAMILIES = {
    "flat": lambda n, cost: flat_state(n),
    "sine-paper": lambda n, cost: sine_state(n),
    "optimal-var": lambda n, cost: optimal_frameness_state(n, cost),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=128)
    ap.add_argument("--cost", choices=["variance", "likelihood"],
                    default="variance")
    args = ap.parse_args()

    ns = np.unique(np.geomspace(2, args.n_max, 24).astype(int))
    print(f"cost = {args.cost}")
    print(f"{'N':>5}" + "".join(f"{name:>16}" for name in FAMILIES))
    table = {name: [] for name in FAMILIES}
    for n in ns:
        cost = variance_cost() if args.cost == "variance" else likelihood_cost(int(n))
        row = []
        for name, make in FAMILIES.items():
            c = min_joint_cost(make(int(n), cost).magnitudes(), cost)
            table[name].append(c)
            row.append(c)
        print(f"{n:>5}" + "".join(f"{c:>16.8f}" for c in row))

    if args.cost == "variance":
        upper = ns >= ns[-1] // 2
        print("\nfitted slope over the upper half (variance cost ~ N^slope):")
        for name, costs in table.items():
            slope = np.polyfit(np.log(ns[upper]), np.log(np.array(costs)[upper]), 1)[0]
            print(f"  {name:<12} {slope:+.4f}")
        print(f"  (reference: flat -> -1, optimal-var -> -2;"
              f" 2-2cos(pi/(N+2)) at N={ns[-1]} is"
              f" {2 - 2 * math.cos(math.pi / (ns[-1] + 2)):.3e})")


if __name__ == "__main__":
    main()
