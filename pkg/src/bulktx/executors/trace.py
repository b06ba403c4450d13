"""
Access trace and its checkers.

In trace mode every completed data access is recorded with a per-item
sequence number. Under the keyed locking strategy the sequence of a data
item is its true access order, so conflicting accesses must appear in
increasing transaction-id order. For the relaxed strategies the trace's
serialization graph must be acyclic.

Trace file format, one access per line::

    <encoded item> <txn id> <R|W> <lane> <seq>
"""

from __future__ import annotations

import threading
from collections import defaultdict
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx

from bulktx.storage.items import DataItemId
from bulktx.txmodel.types import OpMode

if TYPE_CHECKING:
    import os
    from collections.abc import Iterable, Iterator

    from bulktx.executors.config import ExecutorConfig


class TraceEntry(NamedTuple):
    item: DataItemId
    txn_id: int
    mode: OpMode
    lane: int
    seq: int


class AccessTrace:
    """Thread-safe recorder of data accesses."""

    def __init__(self, entries: Iterable[TraceEntry] = ()) -> None:
        self._entries: list[TraceEntry] = list(entries)
        self._next_seq: dict[DataItemId, int] = defaultdict(int)
        for e in self._entries:
            self._next_seq[e.item] = max(self._next_seq[e.item], e.seq + 1)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    @property
    def entries(self) -> list[TraceEntry]:
        with self._lock:
            return list(self._entries)

    def record(self, item: DataItemId, txn_id: int, mode: OpMode, lane: int) -> None:
        with self._lock:
            seq = self._next_seq[item]
            self._next_seq[item] = seq + 1
            self._entries.append(TraceEntry(item, txn_id, mode, lane, seq))

    def by_item(self) -> dict[DataItemId, list[TraceEntry]]:
        """Entries per item in sequence order."""
        grouped: dict[DataItemId, list[TraceEntry]] = defaultdict(list)
        for e in self.entries:
            grouped[e.item].append(e)
        return {item: sorted(es, key=lambda e: e.seq) for item, es in grouped.items()}

    def lane_txns(self) -> dict[int, set[int]]:
        """Transactions that touched data on each lane."""
        lanes: dict[int, set[int]] = defaultdict(set)
        for e in self.entries:
            lanes[e.lane].add(e.txn_id)
        return dict(lanes)


def start_trace(config: ExecutorConfig, trace: AccessTrace | None = None) -> AccessTrace | None:
    """The trace to record into: ``trace`` if given, a fresh one if tracing is configured."""
    if trace is not None:
        return trace
    return AccessTrace() if config.trace else None


def format_trace(trace: AccessTrace) -> str:
    return "".join(
        f"{e.item.encode()} {e.txn_id} {e.mode.value} {e.lane} {e.seq}\n" for e in trace.entries
    )


def write_trace(trace: AccessTrace, path: str | os.PathLike[str]) -> None:
    with open(path, "w") as f:
        f.write(format_trace(trace))


def parse_trace(text: str) -> AccessTrace:
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            item, txn, mode, lane, seq = line.split()
            entry = TraceEntry(
                DataItemId.decode(int(item)), int(txn), OpMode(mode), int(lane), int(seq)
            )
            entries.append(entry)
        except ValueError as e:
            raise ValueError(f"line {lineno}: malformed trace entry: {e}") from e
    return AccessTrace(entries)


def read_trace(path: str | os.PathLike[str]) -> AccessTrace:
    with open(path) as f:
        return parse_trace(f.read())


def check_conflict_order(trace: AccessTrace) -> tuple[bool, list[str]]:
    """
    Check that conflicting accesses to each item happen in increasing txn-id order.

    Returns
    -------
    tuple[bool, list[str]]
        (is_valid, list of error messages)
    """
    errors: list[str] = []
    for item, entries in trace.by_item().items():
        max_any = -1
        max_write = -1
        for e in entries:
            later = max_any if e.mode is OpMode.WRITE else max_write
            if later > e.txn_id:
                errors.append(
                    f"{item}: txn {e.txn_id} {e.mode.name.lower()} at seq {e.seq} "
                    f"after conflicting access by txn {later}"
                )
            max_any = max(max_any, e.txn_id)
            if e.mode is OpMode.WRITE:
                max_write = max(max_write, e.txn_id)
    return len(errors) == 0, errors


def serialization_graph(trace: AccessTrace) -> nx.DiGraph:
    """
    Precedence graph of the trace.

    An edge ``a -> b`` means some access of ``a`` precedes a conflicting access
    of ``b`` to the same item. Only nearest conflicts are added per item; the
    remaining ones follow by transitivity, so cycles are preserved.
    """
    graph = nx.DiGraph()
    for entries in trace.by_item().values():
        last_writer: int | None = None
        readers: set[int] = set()
        for e in entries:
            graph.add_node(e.txn_id)
            if e.mode is OpMode.WRITE:
                sources = readers | ({last_writer} if last_writer is not None else set())
                graph.add_edges_from((s, e.txn_id) for s in sources if s != e.txn_id)
                last_writer, readers = e.txn_id, set()
            else:
                if last_writer is not None and last_writer != e.txn_id:
                    graph.add_edge(last_writer, e.txn_id)
                readers.add(e.txn_id)
    return graph


def is_conflict_serializable(trace: AccessTrace) -> bool:
    return bool(nx.is_directed_acyclic_graph(serialization_graph(trace)))
