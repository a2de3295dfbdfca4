"""routelab: exact desk-scale lab for shortest-path speedup techniques."""

from .errors import CapExceeded, InvariantViolation, LengthOverflow
from .graph import (
    Graph,
    GraphStats,
    PathResult,
    SearchStats,
    all_pairs,
    bidirectional_dijkstra,
    dijkstra,
    enumerate_shortest_paths,
    graph_stats,
    load_graph,
    parse_graph,
    perturb_unique,
    save_graph,
)
from .family import (
    FamilyMeta,
    FamilyParams,
    build_family,
    build_tree_graph,
    family_stats,
    predicted_shortest_paths,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "InvariantViolation",
    "LengthOverflow",
    "Graph",
    "GraphStats",
    "PathResult",
    "SearchStats",
    "all_pairs",
    "bidirectional_dijkstra",
    "dijkstra",
    "enumerate_shortest_paths",
    "graph_stats",
    "load_graph",
    "parse_graph",
    "perturb_unique",
    "save_graph",
    "FamilyMeta",
    "FamilyParams",
    "build_family",
    "build_tree_graph",
    "family_stats",
    "predicted_shortest_paths",
    "__version__",
]
