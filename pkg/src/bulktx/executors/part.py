"""
Partition-based strategy.

A bulk of single-partition transactions is mapped to partition ids, the
array P of (partition, transaction) pairs is sorted by partition, and each
lane task finds its partition's boundaries in P by binary search and runs
that partition's transactions one after another. No locks are taken.

The relaxed schedule builds the same groups without sorting: per-partition
counters hand out positions and an exclusive prefix sum over the counters
gives each group's start.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from bulktx.exceptions import SchedulingError
from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.executors.lanes import borrow_lanes
from bulktx.executors.outcome import ExecOutcome
from bulktx.executors.recovery import settle
from bulktx.executors.tpl import exec_tpl
from bulktx.executors.trace import start_trace
from bulktx.storage.column_store import merge_inserts
from bulktx.storage.locks import LockTable
from bulktx.storage.undo import UndoLog
from bulktx.txmodel.accessor import StoreAccessor, run_procedure

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from bulktx.executors.lanes import LanePool
    from bulktx.executors.trace import AccessTrace
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnOutcome, TxnSignature

log = structlog.get_logger()


@dataclass(frozen=True)
class PartitionSchedule:
    """
    Transactions grouped by partition.

    Attributes
    ----------
    partitions : np.ndarray
        Partition id of each position (the first column of P).
    txn_ids : np.ndarray
        Transaction id of each position.
    bounds : list[tuple[int, int, int]]
        ``(partition, start, end)`` of each group; the groups tile P.
    """

    partitions: np.ndarray
    txn_ids: np.ndarray
    bounds: list[tuple[int, int, int]]

    def __len__(self) -> int:
        return len(self.txn_ids)

    def groups(self) -> dict[int, list[int]]:
        """Transaction ids per partition, in schedule order."""
        return {p: [int(t) for t in self.txn_ids[s:e]] for p, s, e in self.bounds}

    def largest_group(self) -> int:
        return max((e - s for _, s, e in self.bounds), default=0)


def partition_ids(
    registry: TypeRegistry, bulk: Sequence[TxnSignature], partition_size: int
) -> list[int | None]:
    """Partition of each transaction; ``None`` for cross-partition ones."""
    return [registry.get(s.type_id).partition_of(s.params, partition_size) for s in bulk]


def build_partition_schedule(
    registry: TypeRegistry, bulk: Sequence[TxnSignature], partition_size: int = 128
) -> PartitionSchedule:
    """
    Map, sort and bound a bulk of single-partition transactions.

    Raises
    ------
    SchedulingError
        If a transaction is not single-partition.
    """
    pids = partition_ids(registry, bulk, partition_size)
    cross = [s.id for s, p in zip(bulk, pids, strict=True) if p is None]
    if cross:
        raise SchedulingError(f"cross-partition transactions in a PART bulk: {cross[:5]}")
    ids = np.fromiter((s.id for s in bulk), dtype=np.int64, count=len(bulk))
    by_id = np.argsort(ids, kind="stable")
    ids = ids[by_id]
    parts = np.asarray(pids, dtype=np.int64)[by_id]

    order = np.argsort(parts, kind="stable")
    p_sorted, t_sorted = parts[order], ids[order]
    uniq = np.unique(p_sorted)
    starts = np.searchsorted(p_sorted, uniq, side="left")
    ends = np.searchsorted(p_sorted, uniq, side="right")
    bounds = [(int(p), int(s), int(e)) for p, s, e in zip(uniq, starts, ends, strict=True)]
    return PartitionSchedule(p_sorted, t_sorted, bounds)


def exclusive_prefix(counts: np.ndarray) -> np.ndarray:
    """Start offset of each group: ``[3, 1, 2]`` gives ``[0, 3, 4]``."""
    starts = np.zeros(len(counts), dtype=np.int64)
    if len(counts) > 1:
        np.cumsum(counts[:-1], out=starts[1:])
    return starts


def exec_part_relaxed_gen(
    registry: TypeRegistry,
    pool: Sequence[TxnSignature],
    partition_size: int = 128,
    *,
    lanes: LanePool | None = None,
) -> PartitionSchedule:
    """
    Group a pool by partition with counters and a prefix sum.

    Each transaction takes its position inside its partition's group by
    fetch-and-add on the partition's counter; given ``lanes`` the positions
    are handed out concurrently, so the order inside a group follows the
    lanes and not the ids. Groups appear in order of first occurrence.

    Raises
    ------
    SchedulingError
        If a transaction is not single-partition.
    """
    pids = partition_ids(registry, pool, partition_size)
    dense: dict[int, int] = {}
    slots = np.empty(len(pool), dtype=np.int64)
    for i, (sig, p) in enumerate(zip(pool, pids, strict=True)):
        if p is None:
            raise SchedulingError(f"cross-partition transaction {sig.id} in a PART bulk")
        slots[i] = dense.setdefault(p, len(dense))

    counters = LockTable()
    relative = np.empty(len(pool), dtype=np.int64)

    def count(lo: int, hi: int) -> Callable[[int], None]:
        def run(lane: int) -> None:
            for i in range(lo, hi):
                relative[i] = counters.fetch_add(int(slots[i]))

        return run

    if lanes is None or len(pool) < 2:
        count(0, len(pool))(0)
    else:
        step = -(-len(pool) // lanes.lane_count)
        lanes.run([count(lo, min(lo + step, len(pool))) for lo in range(0, len(pool), step)])

    sizes = np.array([counters.value(g) for g in range(len(dense))], dtype=np.int64)
    starts = exclusive_prefix(sizes)
    pos = starts[slots] + relative
    txn_ids = np.empty(len(pool), dtype=np.int64)
    partitions = np.empty(len(pool), dtype=np.int64)
    txn_ids[pos] = [s.id for s in pool]
    group_pid = np.fromiter(dense, dtype=np.int64, count=len(dense))
    partitions[pos] = group_pid[slots]
    bounds = [
        (int(p), int(s), int(s + n)) for p, s, n in zip(group_pid, starts, sizes, strict=True)
    ]
    return PartitionSchedule(partitions, txn_ids, bounds)


def _run_schedule(
    strategy: Strategy,
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    schedule: PartitionSchedule,
    config: ExecutorConfig,
    lanes: LanePool | None,
    trace: AccessTrace | None,
    merge: bool,
    start: float,
) -> ExecOutcome:
    sigs = {s.id: s for s in bulk}
    undo = UndoLog(s.id for s in bulk if not registry.is_two_phase(s.type_id))
    trace = start_trace(config, trace)
    recorder = trace.record if trace is not None else None

    def task(lo: int, hi: int) -> Callable[[int], list[tuple[int, TxnOutcome]]]:
        def run(lane: int) -> list[tuple[int, TxnOutcome]]:
            done = []
            for txn_id in schedule.txn_ids[lo:hi].tolist():
                sig = sigs[txn_id]
                acc = StoreAccessor(store, sig, undo=undo, recorder=recorder, lane=lane)
                committed = run_procedure(registry.get(sig.type_id), acc, sig.params)
                done.append((txn_id, settle(store, undo, txn_id, committed)))
            return done

        return run

    with borrow_lanes(config, lanes) as pool:
        before = pool.txn_counts.copy()
        results = pool.run([task(s, e) for _, s, e in schedule.bounds])
        lane_counts = pool.txn_counts - before
    if merge:
        merge_inserts(store)

    outcomes = dict(sorted(pair for group in results for pair in group))
    result = ExecOutcome(
        strategy,
        outcomes,
        store,
        wall_seconds=time.perf_counter() - start,
        lane_txn_counts=lane_counts,
        trace=trace,
    )
    log.debug(
        "partitioned bulk executed",
        strategy=str(strategy),
        txns=len(bulk),
        partitions=len(schedule.bounds),
        critical_path=schedule.largest_group(),
        aborted=result.aborted,
    )
    return result


def exec_part(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    lanes: LanePool | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute a bulk of single-partition transactions, one lane task per partition.

    Aborted transactions are rolled back on their lane before the partition's
    next transaction runs.

    Raises
    ------
    SchedulingError
        If a transaction is not single-partition.
    """
    config = config or ExecutorConfig()
    start = time.perf_counter()
    schedule = build_partition_schedule(registry, bulk, config.partition_size)
    return _run_schedule(
        Strategy.PART, store, registry, bulk, schedule, config, lanes, trace, merge, start
    )


def exec_part_relaxed(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    lanes: LanePool | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """Execute a bulk on the sort-free schedule of :func:`exec_part_relaxed_gen`."""
    config = config or ExecutorConfig()
    start = time.perf_counter()
    with borrow_lanes(config, lanes) as pool:
        schedule = exec_part_relaxed_gen(registry, bulk, config.partition_size, lanes=pool)
        return _run_schedule(
            Strategy.PART_RELAXED, store, registry, bulk, schedule, config, pool, trace, merge,
            start,
        )


def exec_part_with_fallback(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    lanes: LanePool | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute a PART bulk that may contain cross-partition transactions.

    The bulk is cut, in id order, into maximal runs of single-partition and of
    cross-partition transactions; the former go through :func:`exec_part`,
    the latter through :func:`exec_tpl`, one after the other.
    """
    config = config or ExecutorConfig()
    ordered = sorted(bulk, key=lambda s: s.id)
    cross = [p is None for p in partition_ids(registry, ordered, config.partition_size)]
    if not any(cross):
        return exec_part(store, registry, ordered, config, lanes=lanes, trace=trace, merge=merge)

    trace = start_trace(config, trace)
    segments: list[tuple[bool, list[TxnSignature]]] = []
    for sig, is_cross in zip(ordered, cross, strict=True):
        if segments and segments[-1][0] == is_cross:
            segments[-1][1].append(sig)
        else:
            segments.append((is_cross, [sig]))

    parts = []
    with borrow_lanes(config, lanes) as pool:
        for is_cross, segment in segments:
            run = exec_tpl if is_cross else exec_part
            parts.append(
                run(store, registry, segment, config, lanes=pool, trace=trace, merge=False)
            )
    if merge:
        merge_inserts(store)
    log.debug(
        "part bulk split for cross-partition transactions",
        segments=len(segments),
        cross=sum(cross),
    )
    return ExecOutcome.combine(Strategy.PART, parts)
