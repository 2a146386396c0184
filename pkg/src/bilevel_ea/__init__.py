"""Bi-level (1+1) EAs for the generalized minimum spanning tree and
generalized travelling salesman problems."""

from .decoders import (
    DecodedSolution,
    best_nodes_for_tour,
    best_nodes_for_tree,
    brute_force_gmstp,
    brute_force_gtsp,
    brute_nodes_for_tour,
    brute_nodes_for_tree,
    mst_on_selection,
)
from .evolution import (
    TrialRecord,
    run_cluster_ea,
    run_tour_ea,
    run_tree_ea,
    similarity,
    undirected_similarity,
)
from .instances import (
    INFINITE,
    ClusteredGraph,
    ClusterGraph,
    cluster_graph,
    generate_gg_mst,
    generate_gg_tsp,
    generate_gs,
    generate_random,
    parse_instance,
    write_instance,
)

__version__ = "0.1.0"
