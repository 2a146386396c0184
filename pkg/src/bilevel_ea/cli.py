"""Command-line front end: ``bilevel-ea <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys

from . import decoders, harness
from .evolution import RUNNERS
from .instances import (
    generate_gg_mst,
    generate_gg_tsp,
    generate_gs,
    generate_random,
    load_instance,
    save_instance,
)


def parse_edges(text: str) -> decoders.ClusterTree:
    """``"0-1,1-2"`` -> tree edges."""
    edges = []
    for part in text.split(","):
        a, b = part.strip().split("-")
        edges.append((int(a), int(b)))
    return decoders.make_tree(edges)


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def cmd_generate(args) -> int:
    if args.family == "gs":
        g = generate_gs(args.m)
    elif args.family == "gg-mst":
        g = generate_gg_mst(args.m)
    elif args.family == "gg-tsp":
        g = generate_gg_tsp(args.m)
    else:
        sizes = parse_ints(args.sizes) if args.sizes else (3,)
        if len(sizes) == 1:
            sizes = sizes * args.m
        g = generate_random(args.m, list(sizes), args.max_cost, args.seed)
        if args.certify:
            g = decoders.certify(g, args.certify)
    save_instance(g, args.out)
    print(f"wrote {args.family} instance n={g.n} m={g.m} "
          f"known_optimum={g.known_optimum} to {args.out}")
    return 0


def cmd_solve(args) -> int:
    g = load_instance(args.instance)
    algo = args.algo
    if algo == "dp-tree":
        if not args.tree:
            raise SystemExit("dp-tree needs --tree")
        sol = decoders.best_nodes_for_tree(g, parse_edges(args.tree))
    elif algo == "cluster-opt":
        if not args.tour:
            raise SystemExit("cluster-opt needs --tour")
        tour = parse_ints(args.tour)
        decoders.check_tour(tour, g.m)
        sol = decoders.best_nodes_for_tour(g, tour)
    elif algo == "mst":
        if not args.selection:
            raise SystemExit("mst needs --selection")
        sel = parse_ints(args.selection)
        decoders.check_selection(g, sel)
        sol = decoders.mst_on_selection(g, sel)
    elif algo == "brute-gmstp":
        sol = decoders.brute_force_gmstp(g)
    else:
        sol = decoders.brute_force_gtsp(g)
    print(f"cost {sol.cost}")
    print("selection " + " ".join(map(str, sol.selection)))
    print("edges " + " ".join(f"{u}-{v}" for u, v in sol.structure_edges))
    if g.scale != 1 and sol.cost != float("inf"):
        print(f"unscaled {sol.cost / g.scale:g}")
    return 0


def cmd_evolve(args) -> int:
    g = load_instance(args.instance)
    rec = RUNNERS[args.algo](g, args.budget, args.seed)
    print(f"evaluations {rec.evaluations}")
    hit = "" if rec.evaluations_to_optimum is None else rec.evaluations_to_optimum
    print(f"evals_to_opt {hit}")
    print(f"best_cost {rec.best_cost}")
    print(f"plateau {int(rec.hit_local_plateau)}")
    print(f"wall_ms {rec.wall_time_ms:.1f}")
    return 0


def cmd_experiment(args) -> int:
    cfg = harness.load_config(args.config)
    records = harness.run_experiment(cfg)
    harness.emit_csv(records, args.out, timing=cfg.timing)
    stats = harness.summarize(records)
    if args.summary:
        harness.emit_csv(stats, args.summary)
    sys.stdout.write(harness.summary_csv(stats))
    return 0


def cmd_verify(args) -> int:
    report = harness.verify_oracles(args.seed, args.count, args.gtsp_count, log=print)
    print(f"{report.passed} passed, {report.failed} failed")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bilevel-ea", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance")
    g.add_argument("--family", required=True, choices=["gs", "gg-mst", "gg-tsp", "random"])
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--sizes", help="cluster sizes, one value or m values")
    g.add_argument("--max-cost", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--certify", choices=["gmstp", "gtsp"],
                   help="fill known_optimum by brute force (random family)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run a lower-level solver or an oracle")
    s.add_argument("--algo", required=True,
                   choices=["dp-tree", "cluster-opt", "mst", "brute-gmstp", "brute-gtsp"])
    s.add_argument("--instance", required=True)
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--tree", help="cluster tree edges, e.g. 0-1,0-2,0-3")
    grp.add_argument("--tour", help="cluster permutation, e.g. 0,1,2,3")
    grp.add_argument("--selection", help="one node per cluster, for --algo mst")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("evolve", help="one seeded EA run")
    e.add_argument("--algo", required=True, choices=sorted(RUNNERS))
    e.add_argument("--instance", required=True)
    e.add_argument("--budget", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_evolve)

    x = sub.add_parser("experiment", help="multi-trial campaign from a config file")
    x.add_argument("--config", required=True)
    x.add_argument("--out", required=True, help="per-trial CSV")
    x.add_argument("--summary", help="optional summary CSV")
    x.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify-oracles", help="fast decoders vs brute force")
    v.add_argument("--count", type=int, default=200)
    v.add_argument("--gtsp-count", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
