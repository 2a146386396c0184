"""Exact lower-level solvers and brute-force oracles.

Every decoder returns the lexicographically smallest optimal selection
(compared cluster by cluster in cluster-id order), so fast decoders and
oracles agree selection-for-selection and not only in cost.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from ._kernels import mst_kernel, tour_kernel, tree_kernel
from .instances import ClusteredGraph, ClusterGraph, Cost, as_cost

NodeSelection = tuple[int, ...]
Edge = tuple[int, int]
ClusterTree = frozenset  # of (i, j) cluster pairs with i < j
ClusterTour = tuple[int, ...]

BRUTE_SELECTION_LIMIT = 10**6
BRUTE_GTSP_LIMIT = 10**7


class OracleSizeError(ValueError):
    """Raised when an instance is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class DecodedSolution:
    """Lower-level result.  The selection and realized edges are computed on
    first access, so hot loops that only compare costs never pay for them."""

    cost: Cost
    _realize: Callable[[], tuple[NodeSelection, tuple[Edge, ...]]] = field(
        repr=False, compare=False
    )

    @cached_property
    def _realized(self):
        return self._realize()

    @property
    def selection(self) -> NodeSelection:
        return self._realized[0]

    @property
    def structure_edges(self) -> tuple[Edge, ...]:
        return self._realized[1]


def make_tree(edges) -> ClusterTree:
    return frozenset((min(i, j), max(i, j)) for i, j in edges)


def check_selection(g: ClusteredGraph, p: Sequence[int]) -> None:
    if len(p) != g.m:
        raise ValueError(f"selection has {len(p)} nodes for {g.m} clusters")
    for i, v in enumerate(p):
        if not 0 <= v < g.n or g.cluster_of[v] != i:
            raise ValueError(f"node {v} is not in cluster {i}")


def check_tour(tour: Sequence[int], m: int) -> None:
    if sorted(tour) != list(range(m)):
        raise ValueError(f"{tuple(tour)} is not a permutation of range({m})")


def root_tree(t: ClusterTree, m: int) -> tuple[np.ndarray, np.ndarray]:
    """BFS order from cluster 0 and the parent of each cluster."""
    if len(t) != m - 1:
        raise ValueError(f"a spanning tree on {m} clusters needs {m - 1} edges")
    adj: list[list[int]] = [[] for _ in range(m)]
    for i, j in t:
        adj[i].append(j)
        adj[j].append(i)
    parent = np.full(m, -1, dtype=np.int64)
    parent[0] = 0
    order = [0]
    for i in order:
        for j in adj[i]:
            if parent[j] < 0:
                parent[j] = i
                order.append(j)
    if len(order) != m:
        raise ValueError("edge set does not span all clusters")
    return np.array(order, dtype=np.int64), parent


def _pin_lexicographic(g: ClusteredGraph, target, solve) -> NodeSelection:
    # fix clusters in id order to the smallest node that keeps `target` reachable
    allowed = np.ones(g.n, dtype=np.bool_)
    chosen = []
    for i in range(g.m):
        nodes = g.cluster(i)
        allowed[nodes] = False
        for u in nodes[:-1]:
            allowed[u] = True
            if solve(allowed) == target:
                break
            allowed[u] = False
        else:
            u = nodes[-1]
            allowed[u] = True
        chosen.append(int(u))
    return tuple(chosen)


# ---------------------------------------------------------------------------
# fast decoders
# ---------------------------------------------------------------------------


def mst_on_selection(g: ClusteredGraph, p: Sequence[int]) -> DecodedSolution:
    sel = np.asarray(p, dtype=np.int64)
    total, eu, ev, k = mst_kernel(g.cost, sel)

    def realize():
        chosen = tuple(int(v) for v in sel)
        return chosen, tuple(zip(eu[:k].tolist(), ev[:k].tolist()))

    return DecodedSolution(as_cost(total), realize)


def best_nodes_for_tree(g: ClusteredGraph, t: ClusterTree) -> DecodedSolution:
    order, parent = root_tree(t, g.m)

    def solve(allowed):
        return tree_kernel(g.cost, g.members, g.offsets, allowed, order, parent)

    opt = solve(g.all_nodes)

    def realize():
        sel = _pin_lexicographic(g, opt, solve)
        return sel, tuple((sel[i], sel[j]) for i, j in sorted(t))

    return DecodedSolution(as_cost(opt), realize)


def _tour_edges(tour, sel) -> tuple[Edge, ...]:
    m = len(tour)
    return tuple((sel[tour[i]], sel[tour[(i + 1) % m]]) for i in range(m))


def best_nodes_for_tour(g: ClusteredGraph, tour: Sequence[int]) -> DecodedSolution:
    order = np.asarray(tour, dtype=np.int64)

    def solve(allowed):
        return tour_kernel(g.cost, g.members, g.offsets, allowed, order)

    opt = solve(g.all_nodes)
    tour = tuple(tour)

    def realize():
        sel = _pin_lexicographic(g, opt, solve)
        return sel, _tour_edges(tour, sel)

    return DecodedSolution(as_cost(opt), realize)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def all_selections(g: ClusteredGraph, limit: int = BRUTE_SELECTION_LIMIT) -> np.ndarray:
    """Every selection as rows of an (S, m) array, in lexicographic order."""
    total = math.prod(g.cluster_sizes())
    if total > limit:
        raise OracleSizeError(f"{total} selections exceed the limit of {limit}")
    grids = np.meshgrid(*[g.cluster(i) for i in range(g.m)], indexing="ij")
    return np.stack([x.ravel() for x in grids], axis=1)


def _brute_pairs(g: ClusteredGraph, pairs: list[tuple[int, int]]):
    sels = all_selections(g)
    totals = np.zeros(sels.shape[0])
    for i, j in pairs:
        totals += g.cost[sels[:, i], sels[:, j]]
    best = int(np.argmin(totals))
    return as_cost(totals[best]), tuple(int(v) for v in sels[best])


def brute_nodes_for_tree(g: ClusteredGraph, t: ClusterTree) -> DecodedSolution:
    root_tree(t, g.m)
    pairs = sorted(t)
    cost, sel = _brute_pairs(g, pairs)
    edges = tuple((sel[i], sel[j]) for i, j in pairs)
    return DecodedSolution(cost, lambda: (sel, edges))


def brute_nodes_for_tour(g: ClusteredGraph, tour: Sequence[int]) -> DecodedSolution:
    check_tour(tour, g.m)
    tour = tuple(tour)
    m = len(tour)
    cost, sel = _brute_pairs(g, [(tour[i], tour[(i + 1) % m]) for i in range(m)])
    edges = _tour_edges(tour, sel)
    return DecodedSolution(cost, lambda: (sel, edges))


def brute_force_gmstp(g: ClusteredGraph) -> DecodedSolution:
    """Global GMSTP optimum: every selection, each solved by Kruskal."""
    best_cost, best = math.inf, None
    for row in all_selections(g):
        total = mst_kernel(g.cost, row)[0]
        if best is None or total < best_cost:
            best_cost, best = total, row
    return mst_on_selection(g, best)


def canonical_tours(m: int) -> Iterator[ClusterTour]:
    """One tour per class of rotations and reversals (cluster 0 first)."""
    if m == 2:
        yield (0, 1)
        return
    for rest in itertools.permutations(range(1, m)):
        if rest[0] < rest[-1]:
            yield (0,) + rest


def brute_force_gtsp(g: ClusteredGraph) -> DecodedSolution:
    """Global GTSP optimum: every tour class times every selection."""
    m = g.m
    work = max(1, math.factorial(m - 1) // 2) * math.prod(g.cluster_sizes())
    if work > BRUTE_GTSP_LIMIT:
        raise OracleSizeError(f"{work} tour/selection pairs exceed {BRUTE_GTSP_LIMIT}")
    best = None
    for tour in canonical_tours(m):
        sol = brute_nodes_for_tour(g, tour)
        if best is None or sol.cost < best.cost:
            best = sol
    return best


def certify(g: ClusteredGraph, problem: str) -> ClusteredGraph:
    """Return ``g`` with its known optimum filled in by the matching oracle."""
    oracle = {"gmstp": brute_force_gmstp, "gtsp": brute_force_gtsp}[problem]
    return g.with_known_optimum(oracle(g).cost)


def spanning_trees(h: ClusterGraph) -> Iterator[ClusterTree]:
    """Enumerate every spanning tree of ``h`` (small graphs only)."""
    m = h.m
    for subset in itertools.combinations(h.edges, m - 1):
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            yield frozenset(subset)
