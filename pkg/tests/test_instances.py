import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilevel_ea import decoders
from bilevel_ea.evolution import similarity, undirected_similarity
from bilevel_ea.instances import (
    INFINITE,
    ClusteredGraph,
    InstanceFormatError,
    cluster_graph,
    generate_gg_mst,
    generate_gg_tsp,
    generate_gs,
    generate_random,
    parse_instance,
    write_instance,
)

from conftest import (
    brute_mst_cost,
    brute_tour_cost,
    count_spanning_trees,
    spanning_edge_sets,
)

GENERATORS = [generate_gs, generate_gg_mst, generate_gg_tsp]


@pytest.mark.parametrize("gen", GENERATORS)
@pytest.mark.parametrize("m", [4, 5, 7])
def test_generator_invariants(gen, m):
    g = gen(m)
    assert np.array_equal(g.cost, g.cost.T)
    assert np.isinf(np.diagonal(g.cost)).all()
    assert sorted(g.members.tolist()) == list(range(g.n))
    assert sum(g.cluster_sizes()) == g.n
    assert min(g.cluster_sizes()) >= 1
    for i in range(g.m):
        nodes = g.cluster(i)
        assert np.isinf(g.cost[np.ix_(nodes, nodes)]).all()


@pytest.mark.parametrize("gen", GENERATORS)
def test_generators_reject_small_m(gen):
    with pytest.raises(ValueError):
        gen(3)


def test_gs_costs():
    g = generate_gs(4)
    assert (g.n, g.m, g.known_optimum) == (16, 4, 3)
    opt_central, sub_central = 0, 1
    opt_periph, sub_periph = 4, 5
    assert g.edge_cost(opt_periph, opt_central) == 1
    assert g.edge_cost(sub_periph, opt_central) == 256
    assert g.edge_cost(opt_periph, sub_central) == 16
    assert g.edge_cost(sub_periph, sub_central) == 2
    assert g.edge_cost(opt_periph, 8) is INFINITE


def test_gs_all_suboptimal_mst():
    g = generate_gs(4)
    sel = [1, 5, 9, 13]
    assert brute_mst_cost(g.cost, sel) == 6


@pytest.mark.parametrize("m", [4, 5, 6])
def test_gs_cluster_graph_is_a_star(m):
    h = cluster_graph(generate_gs(m))
    assert h.edges == tuple((0, i) for i in range(1, m))
    assert count_spanning_trees(m, h.edges) == 1


def test_gg_mst_structure():
    g = generate_gg_mst(4)
    assert (g.n, g.scale, g.known_optimum) == (5, 8, 22)
    assert g.edge_cost(0, 2) is INFINITE  # hub to the second central cluster
    assert cluster_graph(g).edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3))


def _gg_mst_tree_costs(g):
    """(tree, best cost) for every spanning tree, by enumerating cluster 0."""
    h = cluster_graph(g)
    out = []
    for tree in spanning_edge_sets(range(g.m), h.edges):
        best = math.inf
        for hub in g.cluster(0).tolist():
            sel = [hub] + [int(g.cluster(i)[0]) for i in range(1, g.m)]
            best = min(best, sum(g.cost[sel[i], sel[j]] for i, j in tree))
        out.append((frozenset(tree), best))
    return out


@pytest.mark.parametrize("m", [4, 5, 6])
def test_gg_mst_optimum_by_enumeration(m):
    g = generate_gg_mst(m)
    costs = _gg_mst_tree_costs(g)
    best = min(c for _, c in costs)
    assert best == m + (m - 2) * (2 * m + 1) == g.known_optimum
    for tree, c in costs:
        if c == best:
            assert (0, 1) in tree


def test_gg_mst_local_optimum_cost():
    m = 4
    g = generate_gg_mst(m)
    local = frozenset({(0, 2), (0, 3), (1, 2)})  # peripherals on the hub, V2 via one
    costs = dict(_gg_mst_tree_costs(g))
    assert costs[local] == 2 * m * (m - 2) + 2 * m + 1 == 25


def test_gg_tsp_optimal_and_mixed_tours():
    g = generate_gg_tsp(4)
    assert (g.scale, g.known_optimum) == (4, 4)
    assert brute_tour_cost(g, (0, 1, 2, 3)) == 4
    # every non-optimal 4-cluster tour has two consecutive neighbour pairs
    assert brute_tour_cost(g, (0, 1, 3, 2)) == 24
    assert similarity((0, 1, 3, 2), 4) == 1


def test_gg_tsp_all_white_plateau():
    m = 5
    g = generate_gg_tsp(m)
    tour = (0, 2, 4, 1, 3)
    assert similarity(tour, m) == undirected_similarity(tour, m) == 0
    assert brute_tour_cost(g, tour) == m * m


def _optimal_tours(m):
    ident = list(range(m))
    rots = {tuple(ident[k:] + ident[:k]) for k in range(m)}
    return rots | {tuple(reversed(t)) for t in rots}


@pytest.mark.parametrize("m", [4, 5])
def test_gg_tsp_cost_law_exhaustive(m):
    # non-optimal tours cost m + (neighbour pairs that are consecutive either way)
    g = generate_gg_tsp(m)
    optimal = _optimal_tours(m)
    for tour in itertools.permutations(range(m)):
        expected = 1 if tour in optimal else m + undirected_similarity(tour, m)
        assert brute_tour_cost(g, tour) == g.scale * expected, tour


def test_directed_similarity_is_not_reversal_invariant():
    # why the directed form of the law cannot hold on an undirected graph
    tour = (0, 1, 2, 4, 3)
    g = generate_gg_tsp(5)
    rev = tuple(reversed(tour))
    assert similarity(tour, 5) != similarity(rev, 5)
    assert brute_tour_cost(g, tour) == brute_tour_cost(g, rev)


def test_random_single_edge():
    g = generate_random(2, [1, 1], 1, seed=3)
    assert g.edge_cost(0, 1) == 1
    assert g.known_optimum is None


def test_random_is_deterministic():
    a = generate_random(4, [2, 3, 1, 2], 50, seed=9)
    b = generate_random(4, [2, 3, 1, 2], 50, seed=9)
    c = generate_random(4, [2, 3, 1, 2], 50, seed=10)
    assert a == b
    assert a != c


def test_random_certified_optimum_matches_tree_enumeration():
    g = generate_random(4, [3, 3, 3, 3], 20, seed=7)
    glob = decoders.brute_force_gmstp(g).cost
    h = cluster_graph(g)
    by_trees = min(
        decoders.best_nodes_for_tree(g, frozenset(t)).cost
        for t in spanning_edge_sets(range(4), h.edges)
    )
    assert glob == by_trees
    assert decoders.certify(g, "gmstp").known_optimum == glob


def test_random_rejects_bad_parameters():
    with pytest.raises(ValueError):
        generate_random(1, [2], 5, 0)
    with pytest.raises(ValueError):
        generate_random(2, [0, 1], 5, 0)
    with pytest.raises(ValueError):
        generate_random(2, [1, 1], 0, 0)


def test_cluster_graph_drops_infinite_pairs():
    cost = np.full((4, 4), np.inf)
    cost[0, 2] = cost[2, 0] = 5
    cost[1, 3] = cost[3, 1] = 7
    g = ClusteredGraph([0, 1, 2, 2], cost)
    h = cluster_graph(g)
    assert h.edges == ((0, 2), (1, 2))
    assert h.is_connected()


def test_random_complete_cluster_graph():
    h = cluster_graph(generate_random(5, [2] * 5, 9, 1))
    assert len(h.edges) == 10


def test_graph_validation():
    with pytest.raises(ValueError):
        ClusteredGraph([0, 1], np.array([[np.inf, 1], [2, np.inf]]))
    with pytest.raises(ValueError):
        ClusteredGraph([0, 1], np.array([[0, 1], [1, np.inf]]))
    with pytest.raises(ValueError):
        ClusteredGraph([0, 0], np.full((2, 2), np.inf))
    with pytest.raises(ValueError):
        ClusteredGraph([0, 2], np.full((2, 2), np.inf))


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

CANONICAL = """gctsp 1
3 2 1 4
clusters 0 0 1
e 0 2 4
e 1 2 9
"""


def test_canonical_round_trip():
    g = parse_instance(CANONICAL)
    assert write_instance(g) == CANONICAL
    assert g.edge_cost(0, 1) is INFINITE
    assert g.known_optimum == 4


def test_comments_and_unknown_optimum():
    text = "# generated\ngctsp 1\n2 2 3 ?\n# nodes\nclusters 0 1\n"
    g = parse_instance(text)
    assert g.known_optimum is None and g.scale == 3
    assert g.edge_cost(0, 1) is INFINITE


@pytest.mark.parametrize("gen", GENERATORS)
def test_generated_round_trip(gen):
    g = gen(4)
    assert parse_instance(write_instance(g)) == g


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("gctsp 2\n2 2 1 ?\nclusters 0 1\n", 1),
        ("gctsp 1\n2 2 1\nclusters 0 1\n", 2),
        ("gctsp 1\n3 2 1 ?\nclusters 0 1\n", 3),
        ("gctsp 1\n2 2 1 ?\nclusters 0 1\ne 1 0 5\n", 4),
        ("gctsp 1\n2 2 1 ?\nclusters 0 1\ne 0 1 5\ne 0 1 5\n", 5),
        ("gctsp 1\n2 2 1 ?\nclusters 0 1\ne 0 x 5\n", 4),
    ],
)
def test_format_errors_report_line(text, lineno):
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}" in str(err.value)


@settings(max_examples=40, deadline=None)
@given(
    sizes=st.lists(st.integers(1, 3), min_size=2, max_size=5),
    max_cost=st.integers(1, 100),
    seed=st.integers(0, 2**31),
)
def test_round_trip_property(sizes, max_cost, seed):
    g = generate_random(len(sizes), sizes, max_cost, seed)
    text = write_instance(g)
    assert parse_instance(text) == g
    assert write_instance(parse_instance(text)) == text
