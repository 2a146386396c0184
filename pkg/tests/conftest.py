import itertools
import math

import numpy as np
import pytest

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


def _connected(nodes, edges):
    nodes = list(nodes)
    adj = {v: [] for v in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


def spanning_edge_sets(nodes, edges):
    """All spanning trees of (nodes, edges) by subset enumeration."""
    nodes = list(nodes)
    for subset in itertools.combinations(edges, len(nodes) - 1):
        if _connected(nodes, subset):
            yield subset


def brute_mst_cost(cost, nodes):
    """Minimum spanning tree cost over finite edges, by enumeration."""
    nodes = list(nodes)
    if len(nodes) == 1:
        return 0
    edges = [(a, b) for a, b in itertools.combinations(nodes, 2) if np.isfinite(cost[a, b])]
    best = math.inf
    for tree in spanning_edge_sets(nodes, edges):
        best = min(best, sum(cost[a, b] for a, b in tree))
    return best


def count_spanning_trees(m, edges):
    """Kirchhoff's matrix-tree theorem."""
    lap = np.zeros((m, m))
    for a, b in edges:
        lap[a, a] += 1
        lap[b, b] += 1
        lap[a, b] -= 1
        lap[b, a] -= 1
    return int(round(np.linalg.det(lap[1:, 1:])))


def enumerate_selections(g):
    return itertools.product(*[g.cluster(i).tolist() for i in range(g.m)])


def tour_cost(cost, tour, sel):
    m = len(tour)
    return sum(cost[sel[tour[i]], sel[tour[(i + 1) % m]]] for i in range(m))


def brute_tour_cost(g, tour):
    return min(tour_cost(g.cost, tour, sel) for sel in enumerate_selections(g))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
