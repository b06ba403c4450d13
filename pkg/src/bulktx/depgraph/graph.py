"""
Explicit T-dependency graph.

An edge ``t1 -> t2`` exists iff the two transactions conflict, ``t1`` has the
smaller id, and no transaction with an id between them conflicts with both.
:func:`build_graph` constructs the graph from per-item transaction lists and
serves as the oracle for the rank computation; :func:`brute_force_edges`
checks the definition over all pairs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING

import networkx as nx
import structlog

from bulktx.txmodel.types import BasicOp, OpMode

if TYPE_CHECKING:
    from collections.abc import Iterable

    from bulktx.storage.items import DataItemId

log = structlog.get_logger()


def _per_item(ops: Iterable[BasicOp]) -> dict[DataItemId, list[tuple[int, bool]]]:
    """Per-item lists of (txn id, is_write) in id order, one entry per transaction."""
    modes: dict[DataItemId, dict[int, bool]] = defaultdict(dict)
    for op in ops:
        per_txn = modes[op.item]
        per_txn[op.txn_id] = per_txn.get(op.txn_id, False) or op.mode is OpMode.WRITE
    return {item: sorted(per_txn.items()) for item, per_txn in sorted(modes.items())}


def _conflict_sets(
    item_lists: dict[DataItemId, list[tuple[int, bool]]],
) -> dict[int, set[int]]:
    conflicts: dict[int, set[int]] = defaultdict(set)
    for entries in item_lists.values():
        for (a, wa), (b, wb) in combinations(entries, 2):
            if wa or wb:
                conflicts[a].add(b)
                conflicts[b].add(a)
    return conflicts


@dataclass
class TDependencyGraph:
    """
    Dependency DAG over transaction ids.

    Attributes
    ----------
    graph : nx.DiGraph
        Vertices are transaction ids; edges point from smaller to larger id.
    item_lists : dict
        Per data item, the accessing transactions in id order with a write flag.
    """

    graph: nx.DiGraph = field(default_factory=nx.DiGraph)
    item_lists: dict[DataItemId, list[tuple[int, bool]]] = field(default_factory=dict)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return set(self.graph.edges)

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.graph.has_edge(a, b))

    def predecessors(self, txn_id: int) -> list[int]:
        return sorted(self.graph.predecessors(txn_id))

    def in_degree(self, txn_id: int) -> int:
        return int(self.graph.in_degree(txn_id))

    def descendants(self, txn_id: int) -> set[int]:
        return set(nx.descendants(self.graph, txn_id))

    def is_acyclic(self) -> bool:
        return bool(nx.is_directed_acyclic_graph(self.graph))

    def depths(self) -> dict[int, int]:
        return longest_path_depths(self.graph)


def build_graph(ops: Iterable[BasicOp], txns: Iterable[int] = ()) -> TDependencyGraph:
    """
    Build the dependency graph of a pool.

    Each item's list is walked in id order. A read gets an edge from the last
    writer; a write gets an edge from every reader since the last writer, or
    from the last writer itself when no reader intervenes. Candidate edges
    whose endpoints are also linked through an intermediate transaction on
    another item are then dropped.

    Parameters
    ----------
    ops : iterable of BasicOp
        Declared operations of the pool.
    txns : iterable of int, optional
        Transaction ids without operations (isolated vertices).
    """
    ops = list(ops)
    item_lists = _per_item(ops)
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted({op.txn_id for op in ops} | set(txns)))

    candidates: set[tuple[int, int]] = set()
    for entries in item_lists.values():
        last_writer: int | None = None
        readers: list[int] = []
        for txn, is_write in entries:
            if is_write:
                if readers:
                    candidates.update((r, txn) for r in readers)
                elif last_writer is not None:
                    candidates.add((last_writer, txn))
                last_writer, readers = txn, []
            else:
                if last_writer is not None:
                    candidates.add((last_writer, txn))
                readers.append(txn)

    conflicts = _conflict_sets(item_lists)
    for a, b in sorted(candidates):
        if not any(a < t < b for t in conflicts[a] & conflicts[b]):
            graph.add_edge(a, b)
    log.debug("graph built", vertices=graph.number_of_nodes(), edges=graph.number_of_edges())
    return TDependencyGraph(graph, item_lists)


def brute_force_edges(ops: Iterable[BasicOp]) -> set[tuple[int, int]]:
    """Edge set by direct evaluation of the edge conditions over all pairs."""
    ops = list(ops)
    conflicts = _conflict_sets(_per_item(ops))
    txns = sorted({op.txn_id for op in ops})
    edges = set()
    for i, a in enumerate(txns):
        for b in txns[i + 1 :]:
            if b not in conflicts[a]:
                continue
            if not any(t in conflicts[a] and t in conflicts[b] for t in txns if a < t < b):
                edges.add((a, b))
    return edges


def longest_path_depths(graph: nx.DiGraph) -> dict[int, int]:
    """Length of the longest path ending at each vertex, in topological order."""
    depths: dict[int, int] = {}
    for v in nx.topological_sort(graph):
        preds = [depths[p] for p in graph.predecessors(v)]
        depths[v] = max(preds) + 1 if preds else 0
    return depths


def dump_graph(dep: TDependencyGraph, depths: dict[int, int] | None = None) -> str:
    """
    Render a graph as text, one vertex per line::

        vertex 3 depth 2 edges 5 7

    ``edges`` lists successors. Depths default to the longest-path depths.
    """
    depths = dep.depths() if depths is None else depths
    lines = []
    for v in dep.vertices:
        succ = " ".join(str(s) for s in sorted(dep.graph.successors(v)))
        lines.append(f"vertex {v} depth {depths[v]} edges {succ}".rstrip())
    return "\n".join(lines) + "\n"


def parse_graph_dump(text: str) -> tuple[nx.DiGraph, dict[int, int]]:
    """
    Parse the output of :func:`dump_graph`.

    Raises
    ------
    ValueError
        On a malformed line.
    """
    graph = nx.DiGraph()
    depths: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if len(words) < 5 or words[0] != "vertex" or words[2] != "depth" or words[4] != "edges":
            raise ValueError(f"line {lineno}: expected 'vertex <id> depth <k> edges ...'")
        v = int(words[1])
        depths[v] = int(words[3])
        graph.add_node(v)
        graph.add_edges_from((v, int(s)) for s in words[5:])
    return graph, depths
