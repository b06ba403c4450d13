"""Structural statistics of a dependency graph and k-set property checks."""

from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING

from pydantic import BaseModel, Field

from bulktx.depgraph.graph import build_graph

if TYPE_CHECKING:
    from collections.abc import Mapping

    from bulktx.depgraph.graph import TDependencyGraph
    from bulktx.depgraph.ranks import RankTable


class GraphStats(BaseModel):
    """
    Inputs of the strategy chooser.

    Attributes
    ----------
    d : int
        Depth of the graph (maximum transaction depth).
    w0 : int
        Size of the 0-set.
    c : int
        Cross-partition transactions, or transactions with more than one
        predecessor when no partition information is available.
    """

    d: int = Field(ge=0)
    w0: int = Field(ge=0)
    c: int = Field(ge=0)

    model_config = {"frozen": True}


def graph_stats(
    ranks: RankTable,
    graph: TDependencyGraph | None = None,
    partitions: Mapping[int, int | None] | None = None,
) -> GraphStats:
    """
    Compute (d, w0, c) for a pool.

    Parameters
    ----------
    ranks : RankTable
        Ranks of the pool.
    graph : TDependencyGraph, optional
        Explicit graph; built from the ranked operations if needed and absent.
    partitions : mapping, optional
        Partition id per transaction, ``None`` for cross-partition ones. When
        given, ``c`` counts the cross-partition transactions.
    """
    d = ranks.depth
    w0 = int((ranks.depths == 0).sum())
    if partitions is not None:
        c = sum(1 for t in ranks.txn_ids if partitions.get(int(t)) is None)
    else:
        if graph is None:
            graph = build_graph(ranks.basic_ops(), (int(t) for t in ranks.txn_ids))
        c = sum(1 for t in ranks.txn_ids if graph.in_degree(int(t)) > 1)
    return GraphStats(d=d, w0=w0, c=c)


def validate_kset_properties(ranks: RankTable) -> tuple[bool, list[str]]:
    """
    Check the k-set properties on ranked operations.

    1. Transactions in the same k-set are pairwise conflict-free.
    2. Every transaction at depth k >= 1 conflicts with one at depth k - 1.

    Returns
    -------
    tuple[bool, list[str]]
        (is_valid, list of error messages)
    """
    errors: list[str] = []
    depth = ranks.depth_map()
    groups: dict[int, list[tuple[int, bool]]] = defaultdict(list)
    for item, txn, w in zip(ranks.items, ranks.txns, ranks.writes, strict=True):
        groups[int(item)].append((int(txn), bool(w)))

    has_parent = {t for t, k in depth.items() if k == 0}
    for item, entries in groups.items():
        by_depth: dict[int, list[tuple[int, bool]]] = defaultdict(list)
        for txn, w in entries:
            by_depth[depth[txn]].append((txn, w))
        for k, same in by_depth.items():
            if len(same) > 1 and any(w for _, w in same):
                txns = sorted(t for t, _ in same)
                errors.append(f"item {item}: conflicting transactions {txns} share depth {k}")
        for txn, w in entries:
            k = depth[txn]
            if k == 0 or txn in has_parent:
                continue
            if any(w or pw for _, pw in by_depth.get(k - 1, ())):
                has_parent.add(txn)

    for t, k in sorted(depth.items()):
        if t not in has_parent:
            errors.append(f"txn {t} at depth {k} conflicts with no transaction at depth {k - 1}")
    return len(errors) == 0, errors
