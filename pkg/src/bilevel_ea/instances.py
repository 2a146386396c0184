"""Clustered graphs, the hard-instance families, and the text instance format.

Costs are held in a float64 matrix with ``inf`` marking absent edges.  Every
finite cost is an integer small enough that all sums stay exact in float64
(generators enforce the bound), so cost comparisons are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

INFINITE = math.inf
Cost = Union[int, float]  # a non-negative int, or INFINITE

# all finite sums of at most n^2 terms stay below this
_EXACT_LIMIT = 2**53

FORMAT_MAGIC = "gctsp 1"


def as_cost(x) -> Cost:
    """Convert a float64 cost to an int, keeping INFINITE."""
    x = float(x)
    return INFINITE if math.isinf(x) else int(x)


@dataclass(frozen=True, eq=False)
class ClusteredGraph:
    """Complete graph on ``n`` nodes partitioned into ``m`` clusters.

    ``cost[u, v]`` is the scaled integer cost (true cost is ``cost / scale``),
    or ``inf`` for absent edges.  The diagonal is always ``inf``.
    """

    cluster_of: np.ndarray
    cost: np.ndarray
    scale: int = 1
    known_optimum: Optional[Cost] = None
    # nodes of cluster i are members[offsets[i]:offsets[i + 1]], ascending
    members: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cluster_of = np.array(self.cluster_of, dtype=np.int64)
        cost = np.array(self.cost, dtype=np.float64)
        n = cluster_of.shape[0]
        if cost.shape != (n, n):
            raise ValueError(f"cost matrix shape {cost.shape} does not match n={n}")
        if n == 0:
            raise ValueError("graph has no nodes")
        m = int(cluster_of.max()) + 1
        if cluster_of.min() < 0:
            raise ValueError("negative cluster id")
        counts = np.bincount(cluster_of, minlength=m)
        if (counts == 0).any():
            raise ValueError(f"cluster {int(np.argmin(counts))} is empty")
        if m < 2:
            raise ValueError("need at least two clusters")
        if not np.array_equal(cost, cost.T):
            raise ValueError("cost matrix is not symmetric")
        if not np.isinf(np.diagonal(cost)).all():
            raise ValueError("diagonal costs must be infinite")
        finite = cost[np.isfinite(cost)]
        if (finite < 0).any() or (finite != np.floor(finite)).any():
            raise ValueError("finite costs must be non-negative integers")
        if finite.size and finite.max() * n * n >= _EXACT_LIMIT:
            raise ValueError("costs too large for exact summation")
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")
        members = np.argsort(cluster_of, kind="stable").astype(np.int64)
        offsets = np.zeros(m + 1, dtype=np.int64)
        offsets[1:] = np.cumsum(counts)
        for arr in (cluster_of, cost, members, offsets):
            arr.setflags(write=False)
        object.__setattr__(self, "cluster_of", cluster_of)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "offsets", offsets)

    @property
    def n(self) -> int:
        return self.cluster_of.shape[0]

    @property
    def m(self) -> int:
        return self.offsets.shape[0] - 1

    @cached_property
    def all_nodes(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=np.bool_)
        mask.setflags(write=False)
        return mask

    @cached_property
    def cluster_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.cluster(i).tolist()) for i in range(self.m))

    def cluster(self, i: int) -> np.ndarray:
        return self.members[self.offsets[i] : self.offsets[i + 1]]

    def cluster_sizes(self) -> list[int]:
        return np.diff(self.offsets).tolist()

    def edge_cost(self, u: int, v: int) -> Cost:
        return as_cost(self.cost[u, v])

    def with_known_optimum(self, value: Optional[Cost]) -> "ClusteredGraph":
        return replace(self, known_optimum=value)

    def __eq__(self, other):
        if not isinstance(other, ClusteredGraph):
            return NotImplemented
        return (
            self.scale == other.scale
            and self.known_optimum == other.known_optimum
            and np.array_equal(self.cluster_of, other.cluster_of)
            and np.array_equal(self.cost, other.cost)
        )

    __hash__ = None


@dataclass(frozen=True)
class ClusterGraph:
    """Contracted graph with one node per cluster.

    Edge ``(i, j)``, ``i < j``, is present iff some pair of nodes across the
    two clusters has finite cost.
    """

    m: int
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.m)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_set

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def is_connected(self) -> bool:
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.m


def cluster_graph(g: ClusteredGraph) -> ClusterGraph:
    m = g.m
    edges = []
    for i in range(m):
        vi = g.cluster(i)
        for j in range(i + 1, m):
            block = g.cost[np.ix_(vi, g.cluster(j))]
            if np.isfinite(block).any():
                edges.append((i, j))
    return ClusterGraph(m, tuple(edges))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _empty_costs(n: int) -> np.ndarray:
    return np.full((n, n), np.inf)


def _set(cost: np.ndarray, u: int, v: int, w) -> None:
    cost[u, v] = cost[v, u] = w


def generate_gs(m: int) -> ClusteredGraph:
    """Star-shaped instance that traps the node-selection EA.

    ``n = m * m``; cluster ``c`` holds nodes ``c*m .. c*m + m - 1`` and its
    first node is the optimal one.  Cluster 0 is central.
    """
    if m < 4:
        raise ValueError("generate_gs needs m >= 4")
    n = m * m
    cluster_of = np.repeat(np.arange(m), m)
    cost = _empty_costs(n)
    central = range(0, m)
    for c in range(1, m):
        for p in range(c * m, c * m + m):
            p_opt = p == c * m
            for q in central:
                q_opt = q == 0
                if p_opt and q_opt:
                    w = 1
                elif not p_opt and not q_opt:
                    w = 2
                elif q_opt:
                    w = n * n
                else:
                    w = n
                _set(cost, p, q, w)
    return ClusteredGraph(cluster_of, cost, scale=1, known_optimum=m - 1)


def generate_gg_mst(m: int) -> ClusteredGraph:
    """Instance that traps the spanning-tree EA, costs scaled by ``2m``.

    Node 0 and 1 form cluster 0 (the unit-cost hub and the half-cost
    connector), node 2 is cluster 1, and node ``i + 1`` is cluster ``i`` for
    ``i >= 2``.
    """
    if m < 4:
        raise ValueError("generate_gg_mst needs m >= 4")
    n = m + 1
    cluster_of = np.array([0, 0] + list(range(1, m)))
    cost = _empty_costs(n)
    hub, connector, second = 0, 1, 2
    for p in range(3, n):
        _set(cost, hub, p, 2 * m)
        _set(cost, second, p, 2 * m + 1)
    _set(cost, connector, second, m)
    return ClusteredGraph(
        cluster_of, cost, scale=2 * m, known_optimum=m + (m - 2) * (2 * m + 1)
    )


def gg_tsp_black(i: int) -> int:
    return 2 * i


def gg_tsp_white(i: int) -> int:
    return 2 * i + 1


def generate_gg_tsp(m: int) -> ClusteredGraph:
    """Instance that traps the tour EA, costs scaled by ``m``.

    Cluster ``i`` is ``{2i (black), 2i + 1 (white)}``; the optimal tour visits
    the black nodes in cluster order.
    """
    if m < 4:
        raise ValueError("generate_gg_tsp needs m >= 4")
    n = 2 * m
    cluster_of = np.repeat(np.arange(m), 2)
    cost = _empty_costs(n)
    for i in range(m):
        for j in range(i + 1, m):
            consecutive = j == i + 1 or (i == 0 and j == m - 1)
            bi, wi, bj, wj = (gg_tsp_black(i), gg_tsp_white(i),
                              gg_tsp_black(j), gg_tsp_white(j))
            _set(cost, bi, bj, 1 if consecutive else m**3)
            _set(cost, wi, wj, 2 * m if consecutive else m)
            _set(cost, bi, wj, m**3)
            _set(cost, wi, bj, m**3)
    return ClusteredGraph(cluster_of, cost, scale=m, known_optimum=m)


def generate_random(
    m: int, sizes: Sequence[int], max_cost: int, seed: int
) -> ClusteredGraph:
    """Uniform inter-cluster costs in ``[1, max_cost]``, intra-cluster absent."""
    if m < 2:
        raise ValueError("need m >= 2")
    if len(sizes) != m:
        raise ValueError(f"expected {m} cluster sizes, got {len(sizes)}")
    if min(sizes) < 1:
        raise ValueError("cluster sizes must be >= 1")
    if max_cost < 1:
        raise ValueError("max_cost must be >= 1")
    rng = np.random.default_rng(seed)
    cluster_of = np.repeat(np.arange(m), sizes)
    n = cluster_of.shape[0]
    upper = rng.integers(1, max_cost, size=(n, n), endpoint=True).astype(np.float64)
    cost = np.triu(upper, 1)
    cost = cost + cost.T
    cost[cluster_of[:, None] == cluster_of[None, :]] = np.inf
    return ClusteredGraph(cluster_of, cost, scale=1)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def write_instance(g: ClusteredGraph) -> str:
    known = "?" if g.known_optimum is None else str(g.known_optimum)
    lines = [
        FORMAT_MAGIC,
        f"{g.n} {g.m} {g.scale} {known}",
        "clusters " + " ".join(str(int(c)) for c in g.cluster_of),
    ]
    us, vs = np.nonzero(np.triu(np.isfinite(g.cost), 1))
    for u, v in zip(us.tolist(), vs.tolist()):
        lines.append(f"e {u} {v} {int(g.cost[u, v])}")
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InstanceFormatError(lineno, f"expected integers, got {' '.join(tokens)!r}")


def parse_instance(text: str) -> ClusteredGraph:
    lines = [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines or lines[0][1] != FORMAT_MAGIC:
        no = lines[0][0] if lines else 1
        raise InstanceFormatError(no, f"expected header {FORMAT_MAGIC!r}")
    if len(lines) < 3:
        raise InstanceFormatError(lines[-1][0], "truncated instance")

    no, header = lines[1]
    parts = header.split()
    if len(parts) != 4:
        raise InstanceFormatError(no, "expected 'n m scale known_optimum|?'")
    n, m, scale = _ints(parts[:3], no)
    known: Optional[Cost] = None if parts[3] == "?" else _ints(parts[3:], no)[0]
    if n < 1 or m < 2 or n < m or scale < 1:
        raise InstanceFormatError(no, f"invalid sizes n={n} m={m} scale={scale}")

    no, cl = lines[2]
    parts = cl.split()
    if parts[0] != "clusters":
        raise InstanceFormatError(no, "expected 'clusters' line")
    cluster_of = _ints(parts[1:], no)
    if len(cluster_of) < n:
        raise InstanceFormatError(no, f"node {len(cluster_of)} has no cluster")
    if len(cluster_of) > n:
        raise InstanceFormatError(no, f"{len(cluster_of)} cluster ids for {n} nodes")
    if any(c < 0 or c >= m for c in cluster_of):
        raise InstanceFormatError(no, f"cluster id out of range [0, {m})")
    if len(set(cluster_of)) != m:
        raise InstanceFormatError(no, "some cluster is empty")

    cost = _empty_costs(n)
    for no, line in lines[3:]:
        parts = line.split()
        if parts[0] != "e" or len(parts) != 4:
            raise InstanceFormatError(no, "expected 'e u v w'")
        u, v, w = _ints(parts[1:], no)
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceFormatError(no, f"node out of range in edge ({u}, {v})")
        if u >= v:
            raise InstanceFormatError(no, f"edge ({u}, {v}) must have u < v")
        if w < 0:
            raise InstanceFormatError(no, "negative cost")
        if np.isfinite(cost[u, v]):
            raise InstanceFormatError(no, f"duplicate edge ({u}, {v})")
        _set(cost, u, v, w)
    try:
        return ClusteredGraph(np.array(cluster_of), cost, scale=scale, known_optimum=known)
    except ValueError as exc:
        raise InstanceFormatError(lines[-1][0], str(exc)) from exc


def load_instance(path) -> ClusteredGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(g: ClusteredGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_instance(g))
