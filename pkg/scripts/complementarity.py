"""Each representation on the other's hard instance.

Prints a success table for tree/cluster EAs on gs(m) and gg-mst(m).
"""

import argparse

from bilevel_ea.harness import ExperimentConfig, run_experiment, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--gs-m", type=int, default=6)
    ap.add_argument("--gg-m", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'algo':8s}{'family':8s}{'m':>4s}{'success':>10s}{'mean evals':>12s}{'mean cost':>11s}")
    for algo in ("tree", "cluster"):
        for family, m in (("gs", args.gs_m), ("gg-mst", args.gg_m)):
            cfg = ExperimentConfig(algo, family, (m,), trials=args.trials,
                                   budget=args.budget, base_seed=args.seed)
            (s,) = summarize(run_experiment(cfg))
            mean = "-" if s.mean_evals is None else f"{s.mean_evals:.1f}"
            print(f"{algo:8s}{family:8s}{m:4d}{s.success_rate:10.2f}{mean:>12s}"
                  f"{s.mean_best_cost:11.1f}")


if __name__ == "__main__":
    main()
