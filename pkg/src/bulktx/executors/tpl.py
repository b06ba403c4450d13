"""
Two-phase locking strategies.

:func:`exec_tpl` runs every transaction of the bulk on its own lane task and
orders conflicting accesses with keyed counter locks: a transaction takes a
slot on its first access to it and hands the slot on after its last declared
access. When every type of the bulk names root-relation lock objects, those
replace the per-item locks (primary-key lock elimination) and are held for
the whole transaction.

Aborts are marked, and rolled back after the bulk together with every
transaction that depends on them.

:func:`exec_tpl_relaxed` uses 0/1 spin locks instead, taken in slot order
before the transaction starts. Its result is serializable but not
necessarily in timestamp order.
"""

from __future__ import annotations

import time
from collections import defaultdict
from typing import TYPE_CHECKING, Any

import structlog

from bulktx.depgraph.graph import build_graph
from bulktx.exceptions import FootprintError, SchedulingError
from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.executors.keyed import plan_keyed_locks
from bulktx.executors.lanes import borrow_lanes
from bulktx.executors.outcome import ExecOutcome
from bulktx.executors.recovery import recover, settle
from bulktx.executors.trace import start_trace
from bulktx.storage.column_store import merge_inserts
from bulktx.storage.locks import LockTable
from bulktx.storage.undo import UndoLog
from bulktx.txmodel.accessor import StoreAccessor, run_procedure
from bulktx.txmodel.footprint import pool_footprint, root_ops_of
from bulktx.txmodel.types import TxnOutcome

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from bulktx.executors.keyed import KeyedLockPlan
    from bulktx.executors.lanes import LanePool
    from bulktx.executors.trace import AccessTrace
    from bulktx.storage.column_store import ColumnStore
    from bulktx.storage.items import DataItemId
    from bulktx.txmodel.footprint import PoolFootprint
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import OpMode, TxnSignature

log = structlog.get_logger()


class _KeyedAccessor(StoreAccessor):
    """Accessor that waits for its key on each lock slot and releases after the last access."""

    def __init__(
        self,
        store: ColumnStore,
        sig: TxnSignature,
        *,
        locks: LockTable,
        plan: KeyedLockPlan,
        lock_of: Callable[[DataItemId], DataItemId | None] | None,
        timeout: float,
        **kwargs: Any,
    ) -> None:
        super().__init__(store, sig, **kwargs)
        self.locks = locks
        self.keys = plan.keys.get(sig.id, {})
        self.release_after = plan.release_after.get(sig.id, {})
        self.lock_of = lock_of
        self.timeout = timeout
        self._held: set[int] = set()
        self._released: set[int] = set()
        self._used: dict[int, int] = defaultdict(int)

    def _slot(self, item: DataItemId) -> int:
        obj = self.lock_of(item) if self.lock_of is not None else None
        if obj is None:
            raise FootprintError(f"txn {self.txn_id} accessed undeclared {item}", item)
        return self.locks.slot(obj)

    def _acquire(self, slot: int) -> None:
        self.locks.wait_for_key(slot, self.keys[slot], self.timeout)
        self._held.add(slot)

    def _release(self, slot: int) -> None:
        self.locks.fetch_add(slot)
        self._released.add(slot)

    def _enter(self, item: DataItemId, mode: OpMode) -> None:
        if self.lock_of is None:
            return
        slot = self._slot(item)
        if slot in self._released:
            raise FootprintError(
                f"txn {self.txn_id} accessed {item} after releasing its lock "
                "(more accesses than declared)",
                item,
            )
        if slot not in self._held:
            self._acquire(slot)

    def _leave(self, item: DataItemId, mode: OpMode) -> None:
        if self.lock_of is None:
            return
        slot = self._slot(item)
        self._used[slot] += 1
        limit = self.release_after.get(slot)
        if limit is not None and self._used[slot] >= limit:
            self._release(slot)

    def acquire_all(self) -> None:
        for slot in sorted(self.keys):
            self._acquire(slot)

    def finish(self) -> None:
        """Complete the key protocol on every slot not yet released."""
        for slot in sorted(self.keys):
            if slot in self._released:
                continue
            if slot not in self._held:
                self._acquire(slot)
            self._release(slot)


def _uses_root_locks(
    registry: TypeRegistry, bulk: Sequence[TxnSignature], fp: PoolFootprint
) -> bool:
    if not bulk or fp.unknown:
        return False
    return all(registry.get(sig.type_id).root_locks is not None for sig in bulk)


def _lock_objects(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    fp: PoolFootprint,
    root: bool,
) -> dict[int, dict[DataItemId, int | None]]:
    objects: dict[int, dict[DataItemId, int | None]] = {}
    by_txn = fp.by_txn()
    for sig in bulk:
        if root:
            objects[sig.id] = {op.item: None for op in root_ops_of(registry, store, sig) or ()}
            continue
        counts = fp.counts.get(sig.id, {})
        objects[sig.id] = {
            op.item: None if op.item.is_table else counts.get(op.item)
            for op in by_txn.get(sig.id, ())
        }
    return objects


def _needs_undo(registry: TypeRegistry, bulk: Sequence[TxnSignature]) -> bool:
    return any(not registry.is_two_phase(sig.type_id) for sig in bulk)


def exec_tpl(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    footprint: PoolFootprint | None = None,
    lanes: LanePool | None = None,
    locks: LockTable | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute a bulk under keyed two-phase locking.

    Parameters
    ----------
    store : ColumnStore
        Modified in place.
    registry : TypeRegistry
        Dispatch table.
    bulk : sequence of TxnSignature
        The bulk, in any order (type grouping only permutes lane assignment).
    config : ExecutorConfig, optional
        Lane and lock settings.
    footprint : PoolFootprint, optional
        Precomputed declared operations of ``bulk``.
    lanes : LanePool, optional
        Lanes to run on; a pool is created from ``config`` otherwise.
    locks : LockTable, optional
        Lock counters, all zero; sized for ``store`` otherwise.
    trace : AccessTrace, optional
        Trace to record into.
    merge : bool, default True
        Merge the insert buffer after the bulk.

    Returns
    -------
    ExecOutcome
        Aborted transactions are ``ABORTED``; committed transactions that read
        an aborted transaction's writes are ``ROLLED_BACK``.

    Raises
    ------
    FootprintError
        If a transaction accesses an item its footprint does not declare.
    SchedulingError
        If the lock counters are not all zero at the start or do not end at
        their locker counts.
    WatchdogTimeout
        If the bulk does not finish within the watchdog bound.
    """
    config = config or ExecutorConfig()
    start = time.perf_counter()
    fp = footprint if footprint is not None else pool_footprint(registry, store, bulk)
    if locks is None:
        locks = LockTable.for_store(store, config.direct_lock_limit, config.spin_limit)
    elif not locks.all_zero():
        raise SchedulingError("lock counters are not zero at bulk start")

    root = _uses_root_locks(registry, bulk, fp)
    plan = plan_keyed_locks(_lock_objects(store, registry, bulk, fp, root), locks)
    undo = UndoLog(sig.id for sig in bulk) if _needs_undo(registry, bulk) else UndoLog()
    trace = start_trace(config, trace)
    recorder = trace.record if trace is not None else None

    def task(sig: TxnSignature) -> Callable[[int], tuple[int, bool]]:
        def run(lane: int) -> tuple[int, bool]:
            declared = fp.declared(sig.id)
            acc = _KeyedAccessor(
                store,
                sig,
                locks=locks,
                plan=plan,
                lock_of=None if root else declared.lock_object,
                timeout=config.watchdog_seconds,
                undo=undo,
                recorder=recorder,
                lane=lane,
            )
            try:
                if root:
                    acc.acquire_all()
                committed = run_procedure(registry.get(sig.type_id), acc, sig.params)
            finally:
                acc.finish()
            if not committed:
                undo.mark(sig.id)
            return sig.id, committed

        return run

    with borrow_lanes(config, lanes) as pool:
        # keys follow id order: with fewer lanes than tasks, dispatch in id order
        dispatch = list(bulk) if pool.lane_count >= len(bulk) else sorted(bulk, key=lambda s: s.id)
        before = pool.txn_counts.copy()
        results = pool.run([task(sig) for sig in dispatch])
        lane_counts = pool.txn_counts - before

    ok, errors = plan.verify(locks)
    if not ok:
        log.error("lock counters inconsistent after bulk", errors=errors[:5])
        raise SchedulingError(f"lock counters inconsistent: {errors[0]}")
    locks.reset()

    outcomes = {
        txn: TxnOutcome.COMMITTED if committed else TxnOutcome.ABORTED
        for txn, committed in sorted(results)
    }
    if undo.marked():
        graph = build_graph(fp.ops, [sig.id for sig in bulk])
        outcomes = recover(store, undo, outcomes, graph)
    if merge:
        merge_inserts(store)

    result = ExecOutcome(
        Strategy.TPL,
        outcomes,
        store,
        wall_seconds=time.perf_counter() - start,
        lane_txn_counts=lane_counts,
        trace=trace,
    )
    log.debug(
        "tpl bulk executed",
        txns=len(bulk),
        root_locks=root,
        slots=len(plan.totals),
        aborted=result.aborted,
        rolled_back=result.rolled_back,
    )
    return result


class _SpinAccessor(StoreAccessor):
    def __init__(
        self,
        store: ColumnStore,
        sig: TxnSignature,
        *,
        lock_of: Callable[[DataItemId], DataItemId | None],
        **kwargs: Any,
    ) -> None:
        super().__init__(store, sig, **kwargs)
        self.lock_of = lock_of

    def _enter(self, item: DataItemId, mode: OpMode) -> None:
        if self.lock_of(item) is None:
            raise FootprintError(f"txn {self.txn_id} accessed undeclared {item}", item)


def exec_tpl_relaxed(
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    footprint: PoolFootprint | None = None,
    lanes: LanePool | None = None,
    locks: LockTable | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute a bulk under conservative two-phase locking with 0/1 spin locks.

    Each transaction takes all of its locks in slot order before running and
    releases them after it has committed or rolled back, so the schedule is
    conflict-serializable and deadlock-free; the serial order it is
    equivalent to need not be the id order.

    Parameters are those of :func:`exec_tpl`.
    """
    config = config or ExecutorConfig()
    start = time.perf_counter()
    fp = footprint if footprint is not None else pool_footprint(registry, store, bulk)
    if locks is None:
        locks = LockTable.for_store(store, config.direct_lock_limit, config.spin_limit)
    elif not locks.all_zero():
        raise SchedulingError("lock counters are not zero at bulk start")

    by_txn = fp.by_txn()
    undo = UndoLog(sig.id for sig in bulk if not registry.is_two_phase(sig.type_id))
    trace = start_trace(config, trace)
    recorder = trace.record if trace is not None else None

    def task(sig: TxnSignature) -> Callable[[int], tuple[int, TxnOutcome]]:
        slots = sorted({locks.slot(op.item) for op in by_txn.get(sig.id, ())})

        def run(lane: int) -> tuple[int, TxnOutcome]:
            acc = _SpinAccessor(
                store,
                sig,
                lock_of=fp.declared(sig.id).lock_object,
                undo=undo,
                recorder=recorder,
                lane=lane,
            )
            taken: list[int] = []
            try:
                for slot in slots:
                    locks.acquire(slot, config.watchdog_seconds)
                    taken.append(slot)
                committed = run_procedure(registry.get(sig.type_id), acc, sig.params)
                return sig.id, settle(store, undo, sig.id, committed)
            finally:
                for slot in reversed(taken):
                    locks.release(slot)

        return run

    with borrow_lanes(config, lanes) as pool:
        before = pool.txn_counts.copy()
        results = pool.run([task(sig) for sig in bulk])
        lane_counts = pool.txn_counts - before
    if merge:
        merge_inserts(store)

    result = ExecOutcome(
        Strategy.TPL_RELAXED,
        dict(sorted(results)),
        store,
        wall_seconds=time.perf_counter() - start,
        lane_txn_counts=lane_counts,
        trace=trace,
    )
    log.debug("relaxed tpl bulk executed", txns=len(bulk), aborted=result.aborted)
    return result
