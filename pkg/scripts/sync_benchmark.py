"""Monte Carlo check that the one-way protocol attains the joint optimum.

For each family and N, runs seeded trials of the measure-report-correct
protocol and compares the mean cost against the analytic minimum; the z
column should sit within a few standard errors of zero.  Also times the
run so thread-count effects are visible (results are identical either way).
"""
import argparse
import time

from framesync import (RandomSource, flat_state, min_joint_cost,
                       monte_carlo_cost, optimal_frameness_state, sine_state,
                       variance_cost)

FAMILIES = {
    "flat": lambda n, cost: flat_state(n),
    "sine-paper": lambda n, cost: sine_state(n),
    "optimal-var": lambda n, cost: optimal_frameness_state(n, cost),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--n-values", type=int, nargs="+", default=[2, 4, 8, 16])
    args = ap.parse_args()

    cost = variance_cost()
    root = RandomSource(args.seed)
    print(f"trials = {args.trials}, seed = {args.seed}, threads = {args.threads}")
    print(f"{'family':<12}{'N':>4}{'mc mean':>14}{'analytic':>14}{'z':>8}{'secs':>8}")
    for fam, (name, make) in enumerate(FAMILIES.items()):
        for i, n in enumerate(args.n_values):
            state = make(n, cost)
            want = min_joint_cost(state.magnitudes(), cost)
            t0 = time.perf_counter()
            mean, sem = monte_carlo_cost(state, cost, args.trials,
                                         root.split(fam).split(i),
                                         threads=args.threads)
            dt = time.perf_counter() - t0
            z = (mean - want) / sem
            print(f"{name:<12}{n:>4}{mean:>14.6f}{want:>14.6f}{z:>8.2f}{dt:>8.2f}")


if __name__ == "__main__":
    main()
