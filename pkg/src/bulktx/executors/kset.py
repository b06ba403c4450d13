"""
0-set strategy.

The pool's ranks are computed once; every round extracts the current 0-set,
whose transactions do not conflict with each other, and runs it as one
lock-free parallel bulk. The barrier at the end of a round separates it from
the next.
"""

from __future__ import annotations

import time
from typing import TYPE_CHECKING

import structlog

from bulktx.depgraph.ranks import RankState
from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.executors.lanes import borrow_lanes
from bulktx.executors.outcome import ExecOutcome
from bulktx.executors.recovery import recover
from bulktx.executors.trace import start_trace
from bulktx.storage.column_store import merge_inserts
from bulktx.storage.undo import UndoLog
from bulktx.txmodel.accessor import StoreAccessor, run_procedure
from bulktx.txmodel.footprint import pool_footprint
from bulktx.txmodel.types import TxnOutcome

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from bulktx.executors.lanes import LanePool
    from bulktx.executors.trace import AccessTrace
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.footprint import PoolFootprint
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()


def exec_kset(
    store: ColumnStore,
    registry: TypeRegistry,
    pool: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    footprint: PoolFootprint | None = None,
    state: RankState | None = None,
    lanes: LanePool | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute a pool round by round, one 0-set per round.

    Parameters
    ----------
    store : ColumnStore
        Modified in place.
    registry : TypeRegistry
        Dispatch table.
    pool : sequence of TxnSignature
        Transactions to execute.
    config : ExecutorConfig, optional
        Lane settings.
    footprint : PoolFootprint, optional
        Precomputed declared operations of ``pool``.
    state : RankState, optional
        Ranks of exactly ``pool``; consumed by the rounds.
    lanes : LanePool, optional
        Lanes to run on.
    trace : AccessTrace, optional
        Trace to record into.
    merge : bool, default True
        Merge the insert buffer after the last round.

    Returns
    -------
    ExecOutcome
        ``rounds`` is the number of 0-sets executed, the graph depth plus one.
    """
    config = config or ExecutorConfig()
    start = time.perf_counter()
    if state is None:
        fp = footprint if footprint is not None else pool_footprint(registry, store, pool)
        state = RankState.from_ops(fp.ops, [s.id for s in pool])
    sigs = {s.id: s for s in pool}
    undo = UndoLog(s.id for s in pool if not registry.is_two_phase(s.type_id))
    trace = start_trace(config, trace)
    recorder = trace.record if trace is not None else None

    def task(sig: TxnSignature) -> Callable[[int], tuple[int, bool]]:
        def run(lane: int) -> tuple[int, bool]:
            acc = StoreAccessor(store, sig, undo=undo, recorder=recorder, lane=lane)
            committed = run_procedure(registry.get(sig.type_id), acc, sig.params)
            if not committed:
                undo.mark(sig.id)
            return sig.id, committed

        return run

    outcomes: dict[int, TxnOutcome] = {}
    rounds = 0
    with borrow_lanes(config, lanes) as lane_pool:
        before = lane_pool.txn_counts.copy()
        while len(state):
            zero = state.extract_zero_set()
            results = lane_pool.run([task(sigs[t]) for t in zero])
            executed = {
                t: TxnOutcome.COMMITTED if ok else TxnOutcome.ABORTED for t, ok in results
            }
            outcomes.update(recover(store, undo, executed))
            for t, ok in results:
                if ok:
                    undo.commit(t)
            rounds += 1
            log.debug("k-set round executed", round=rounds, txns=len(zero))
        lane_counts = lane_pool.txn_counts - before
    if merge:
        merge_inserts(store)

    result = ExecOutcome(
        Strategy.KSET,
        dict(sorted(outcomes.items())),
        store,
        wall_seconds=time.perf_counter() - start,
        rounds=rounds,
        lane_txn_counts=lane_counts,
        trace=trace,
    )
    log.debug("k-set pool executed", txns=len(pool), rounds=rounds, aborted=result.aborted)
    return result
