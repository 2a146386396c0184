"""Optimization time of the node-selection EA on gg-mst(m) as m grows.

Writes per-trial and summary CSVs and prints a least-squares fit of the
mean hitting time against m.
"""

import argparse
from pathlib import Path

import numpy as np

from bilevel_ea.harness import ExperimentConfig, emit_csv, run_experiment, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = ExperimentConfig("cluster", "gg-mst", tuple(args.m), trials=args.trials,
                           budget=100 * max(args.m))
    records = run_experiment(cfg)
    stats = summarize(records)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    emit_csv(records, args.out_dir / "gmst_scaling_trials.csv")
    emit_csv(stats, args.out_dir / "gmst_scaling_summary.csv")

    ms = np.array([s.m for s in stats], dtype=float)
    means = np.array([s.mean_evals for s in stats], dtype=float)
    for s in stats:
        print(f"m={s.m:4d} success={s.success_rate:.2f} mean={s.mean_evals:.1f} "
              f"p90={s.p90_evals:.1f}  mean/m={s.mean_evals / s.m:.2f}")
    slope, intercept = np.polyfit(ms, means, 1)
    print(f"fit: mean evals ~ {slope:.2f} * m + {intercept:.1f}")


if __name__ == "__main__":
    main()
