"""Upper-level (1+1) EAs for the node-selection, spanning-tree and tour
representations, with their mutation operators and samplers."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import decoders
from .decoders import ClusterTour, ClusterTree, DecodedSolution, NodeSelection, make_tree
from .instances import ClusteredGraph, ClusterGraph, Cost, cluster_graph

Rng = Union[np.random.Generator, int, None]

_EXP_MINUS_ONE = math.exp(-1.0)


def as_rng(rng: Rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def plateau_window(m: int) -> int:
    """Evaluations without improvement that count as a stalled run."""
    return 50 * m * m


def randbelow(rng: np.random.Generator, k: int) -> int:
    """Uniform integer in [0, k); several times cheaper than rng.integers."""
    return int(rng.random() * k)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def sample_poisson1(rng: np.random.Generator) -> int:
    # multiply uniforms until the product drops below e^-1
    k = 0
    prod = rng.random()
    while prod >= _EXP_MINUS_ONE:
        k += 1
        prod *= rng.random()
    return k


def uniform_spanning_tree(h: ClusterGraph, rng: np.random.Generator) -> ClusterTree:
    """Uniform spanning tree of ``h`` by Wilson's loop-erased random walks."""
    if not h.is_connected():
        raise ValueError("cluster graph is disconnected; no spanning tree exists")
    adj = h.adjacency()
    in_tree = [False] * h.m
    in_tree[0] = True
    nxt = [-1] * h.m
    for start in range(h.m):
        u = start
        while not in_tree[u]:
            nbrs = adj[u]
            nxt[u] = nbrs[randbelow(rng, len(nbrs))]
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return make_tree((i, nxt[i]) for i in range(1, h.m))


# ---------------------------------------------------------------------------
# mutation operators
# ---------------------------------------------------------------------------


def mutate_selection(
    p: Sequence[int], g: ClusteredGraph, rng: np.random.Generator
) -> NodeSelection:
    """Resample each cluster's node with probability 1/m, uniformly over the
    whole cluster (the current node may come back)."""
    rate = 1.0 / g.m
    out = list(p)
    for i, u in enumerate(rng.random(g.m).tolist()):
        if u < rate:
            nodes = g.cluster_lists[i]
            out[i] = nodes[randbelow(rng, len(nodes))]
    return tuple(out)


def _tree_path(tree, a: int, b: int) -> list[tuple[int, int]]:
    adj: dict[int, list[int]] = {}
    for i, j in tree:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    back = {a: a}
    frontier = [a]
    while b not in back:
        nxt = []
        for u in frontier:
            for v in adj.get(u, ()):
                if v not in back:
                    back[v] = u
                    nxt.append(v)
        frontier = nxt
    path = []
    while b != a:
        u = back[b]
        path.append((min(u, b), max(u, b)))
        b = u
    return path


def edge_swap(tree: set, h: ClusterGraph, rng: np.random.Generator) -> None:
    """Insert a uniform non-tree edge of ``h`` and drop a uniform edge of the
    cycle it closes (possibly the new edge itself).  Mutates ``tree``."""
    outside = [e for e in h.edges if e not in tree]
    if not outside:
        return
    e = outside[randbelow(rng, len(outside))]
    cycle = _tree_path(tree, *e)
    cycle.append(e)
    drop = cycle[randbelow(rng, len(cycle))]
    tree.add(e)
    tree.discard(drop)


def mutate_tree(t: ClusterTree, h: ClusterGraph, rng: np.random.Generator) -> ClusterTree:
    tree = set(t)
    for _ in range(sample_poisson1(rng)):
        edge_swap(tree, h, rng)
    return frozenset(tree)


def jump(tour: list, i: int, j: int) -> None:
    """Move the element at position ``i`` so it ends up at position ``j``."""
    tour.insert(j, tour.pop(i))


def mutate_tour(tour: Sequence[int], rng: np.random.Generator) -> ClusterTour:
    m = len(tour)
    if m < 2:
        raise ValueError("a tour needs at least two clusters")
    out = list(tour)
    for _ in range(1 + sample_poisson1(rng)):
        i = randbelow(rng, m)
        j = randbelow(rng, m - 1)
        if j >= i:
            j += 1
        jump(out, i, j)
    return tuple(out)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def similarity(tour: Sequence[int], m: int) -> int:
    """Cyclic positions whose successor is the next cluster id mod m."""
    return sum(tour[(i + 1) % m] == (tour[i] + 1) % m for i in range(m))


def undirected_similarity(tour: Sequence[int], m: int) -> int:
    """Cyclic neighbour pairs whose ids differ by one mod m, either way round.

    On the GTSP trap instance a non-optimal tour costs ``m`` plus this count
    (unscaled), because the cost of a pair does not depend on direction.
    """
    count = 0
    for i in range(m):
        d = (tour[(i + 1) % m] - tour[i]) % m
        count += d == 1 or d == m - 1
    return count


def tree_distance(t: ClusterTree, t_star: ClusterTree) -> int:
    return len(set(t_star) - set(t))


# ---------------------------------------------------------------------------
# the (1+1) EA loop
# ---------------------------------------------------------------------------


@dataclass
class TrialRecord:
    """Outcome of one seeded run.

    ``trajectory`` lists ``(evaluation, cost)`` whenever the parent cost
    changed, starting with the initial decode.
    """

    evaluations_to_optimum: Optional[int]
    best_cost: Cost
    evaluations: int
    hit_local_plateau: bool
    wall_time_ms: float
    final_genotype: object = None
    trajectory: list = field(default_factory=list)
    trial_index: int = 0
    seed: Optional[int] = None
    algorithm: str = ""
    family: str = ""
    m: int = 0

    @property
    def success(self) -> bool:
        return self.evaluations_to_optimum is not None


def evolve(
    g: ClusteredGraph,
    budget: int,
    genotype,
    mutate: Callable,
    decode: Callable[[object], DecodedSolution],
) -> TrialRecord:
    """Run a (1+1) EA from ``genotype`` until the known optimum is decoded or
    ``budget`` decodes have been spent.  Ties are accepted."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    t0 = time.perf_counter()
    target = g.known_optimum
    window = plateau_window(g.m)

    cost = decode(genotype).cost
    evals = 1
    trajectory = [(1, cost)]
    last_improvement = 1
    longest_stall = 0
    hit = 1 if cost == target else None

    while hit is None and evals < budget:
        child = mutate(genotype)
        child_cost = decode(child).cost
        evals += 1
        if child_cost <= cost:
            if child_cost < cost:
                longest_stall = max(longest_stall, evals - last_improvement - 1)
                last_improvement = evals
                trajectory.append((evals, child_cost))
            genotype, cost = child, child_cost
            if cost == target:
                hit = evals
    longest_stall = max(longest_stall, evals - last_improvement)

    return TrialRecord(
        evaluations_to_optimum=hit,
        best_cost=cost,
        evaluations=evals,
        hit_local_plateau=longest_stall >= window,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
        final_genotype=genotype,
        trajectory=trajectory,
    )


def _seed_of(rng: Rng) -> Optional[int]:
    return rng if isinstance(rng, (int, np.integer)) else None


def run_cluster_ea(g: ClusteredGraph, budget: int, rng: Rng = None) -> TrialRecord:
    """Node-selection representation; the lower level is an MST on the
    chosen nodes."""
    seed, rng = _seed_of(rng), as_rng(rng)
    start = tuple(nodes[randbelow(rng, len(nodes))] for nodes in g.cluster_lists)
    rec = evolve(
        g,
        budget,
        start,
        lambda p: mutate_selection(p, g, rng),
        lambda p: decoders.mst_on_selection(g, p),
    )
    rec.algorithm = "cluster"
    rec.seed = seed
    rec.m = g.m
    return rec


def run_tree_ea(g: ClusteredGraph, budget: int, rng: Rng = None) -> TrialRecord:
    """Spanning trees of the cluster graph, decoded by the rooted-tree DP."""
    seed, rng = _seed_of(rng), as_rng(rng)
    h = cluster_graph(g)
    start = uniform_spanning_tree(h, rng)
    rec = evolve(
        g,
        budget,
        start,
        lambda t: mutate_tree(t, h, rng),
        lambda t: decoders.best_nodes_for_tree(g, t),
    )
    rec.algorithm = "tree"
    rec.seed = seed
    rec.m = g.m
    return rec


def run_tour_ea(g: ClusteredGraph, budget: int, rng: Rng = None) -> TrialRecord:
    """Cluster permutations, decoded by layered shortest paths."""
    seed, rng = _seed_of(rng), as_rng(rng)
    start = tuple(int(c) for c in rng.permutation(g.m))
    rec = evolve(
        g,
        budget,
        start,
        lambda t: mutate_tour(t, rng),
        lambda t: decoders.best_nodes_for_tour(g, t),
    )
    rec.algorithm = "tour"
    rec.seed = seed
    rec.m = g.m
    return rec


RUNNERS = {"cluster": run_cluster_ea, "tree": run_tree_ea, "tour": run_tour_ea}
