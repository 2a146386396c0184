"""Where the tour EA ends up on gg-tsp(m).

For each trial prints the final cost, its similarity to the optimal order
and whether the run stalled; the usual outcome is the all-white plateau.
"""

import argparse
from collections import Counter

from bilevel_ea.evolution import run_tour_ea, similarity, undirected_similarity
from bilevel_ea.instances import generate_gg_tsp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = generate_gg_tsp(args.m)
    outcomes = Counter()
    for k in range(args.trials):
        rec = run_tour_ea(g, args.budget, args.seed + k)
        tour = rec.final_genotype
        s, su = similarity(tour, args.m), undirected_similarity(tour, args.m)
        unscaled = rec.best_cost / g.scale
        print(f"trial {k:3d} cost {unscaled:g} S={s} S_u={su} "
              f"plateau={int(rec.hit_local_plateau)} evals={rec.evaluations}")
        outcomes["optimum" if rec.success else f"cost {unscaled:g}"] += 1
    print("outcomes:", dict(outcomes))


if __name__ == "__main__":
    main()
