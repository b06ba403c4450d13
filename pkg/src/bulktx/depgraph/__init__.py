"""
Dependency-graph machinery.

- :func:`compute_ranks` / :class:`RankState`: data-oriented k-set computation
  with incremental 0-set extraction (the fast path).
- :func:`build_graph`: explicit graph construction (the oracle), with a
  brute-force edge checker, longest-path depths and a text dump.
- :func:`graph_stats`: the (d, w0, c) statistics of the strategy chooser.
"""

from bulktx.depgraph.graph import (
    TDependencyGraph,
    brute_force_edges,
    build_graph,
    dump_graph,
    longest_path_depths,
    parse_graph_dump,
)
from bulktx.depgraph.ranks import RankState, RankTable, compute_ranks, extract_zero_set
from bulktx.depgraph.stats import GraphStats, graph_stats, validate_kset_properties

__all__ = [
    "GraphStats",
    "RankState",
    "RankTable",
    "TDependencyGraph",
    "brute_force_edges",
    "build_graph",
    "compute_ranks",
    "dump_graph",
    "extract_zero_set",
    "graph_stats",
    "longest_path_depths",
    "parse_graph_dump",
    "validate_kset_properties",
]
