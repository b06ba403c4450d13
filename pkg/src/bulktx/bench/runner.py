"""
Benchmark driver.

Transactions are stamped with logical arrival times from the configured
arrival rate and submitted to a pool. The consumer forms bulks at logical
batching boundaries, executes them and advances its clock by the measured
generation and execution time. Each bulk merges its inserts before the next
one is formed. The final state is checked against the sequential oracle,
replayed bulk by bulk with the same merge points, before the report is
returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import structlog

from bulktx.bench.report import BulkRecord, ExecReport
from bulktx.bench.workloads import Workbench, load_workload
from bulktx.exceptions import WatchdogTimeout
from bulktx.executors.config import Strategy
from bulktx.executors.dispatch import execute_bulk
from bulktx.executors.lanes import borrow_lanes
from bulktx.planner.config import EngineConfig
from bulktx.planner.generator import BulkGenerator
from bulktx.storage.snapshot import compare_snapshots, snapshot
from bulktx.txmodel.pool import TxnPool
from bulktx.txmodel.sequential import execute_sequential
from bulktx.txmodel.types import TxnOutcome

if TYPE_CHECKING:
    import os
    from collections.abc import Sequence

    from bulktx.planner.calibration import Measure
    from bulktx.planner.chooser import StrategyThresholds
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()


@dataclass
class BenchRun:
    """A finished run: its report, final store, outcomes and the ids of each bulk."""

    report: ExecReport
    store: ColumnStore
    outcomes: dict[int, TxnOutcome] = field(default_factory=dict)
    bulk_ids: list[list[int]] = field(default_factory=list)


def stamp_arrivals(txns: Sequence[TxnSignature], arrival_rate: float) -> list[TxnSignature]:
    """Logical arrival times ``i / rate``; a rate of 0 submits everything at time 0."""
    if arrival_rate <= 0:
        return [replace(s, submitted_at=0.0) for s in txns]
    return [replace(s, submitted_at=i / arrival_rate) for i, s in enumerate(txns)]


def _boundary(clock: float, interval: float) -> float:
    if interval <= 0:
        return clock
    return math.ceil(clock / interval) * interval


def verify_against_oracle(
    initial: ColumnStore,
    final: ColumnStore,
    bench: Workbench,
    txns: Sequence[TxnSignature],
    outcomes: dict[int, TxnOutcome],
    bulk_ids: Sequence[Sequence[int]] | None = None,
) -> tuple[bool, list[str]]:
    """
    Replay ``txns`` sequentially on ``initial`` and compare with ``final``.

    Rolled-back transactions are forced to abort in the replay. The replay
    must commit exactly the transactions the run committed and reach the
    same state.

    Parameters
    ----------
    bulk_ids : sequence of sequences of int, optional
        Ids of each executed bulk, in execution order. The replay runs each
        bulk in id order and merges inserts after it, so rows become visible
        at the same points as in the run. Transactions in no bulk form a
        last chunk. By default all of ``txns`` is one chunk.

    Returns
    -------
    tuple[bool, list[str]]
        (is_valid, list of error messages)
    """
    errors: list[str] = []
    rolled_back = {t for t, o in outcomes.items() if o is TxnOutcome.ROLLED_BACK}
    oracle = initial.copy()
    by_id = {s.id: s for s in txns}
    chunks = [sorted(ids) for ids in bulk_ids or ()]
    seen = {t for ids in chunks for t in ids}
    unknown = sorted(seen - by_id.keys())
    if unknown:
        errors.append(f"bulks hold transactions not in the workload: {unknown[:10]}")
    chunks.append(sorted(by_id.keys() - seen))
    expected: dict[int, TxnOutcome] = {}
    for ids in chunks:
        chunk = [by_id[t] for t in ids if t in by_id]
        expected.update(
            execute_sequential(oracle, bench.registry, chunk, forced_aborts=rolled_back)
        )

    missing = sorted(set(expected) - set(outcomes))
    if missing:
        errors.append(f"transactions never executed: {missing[:10]}")
    committed = {t for t, o in outcomes.items() if o is TxnOutcome.COMMITTED}
    oracle_committed = {t for t, o in expected.items() if o is TxnOutcome.COMMITTED}
    if committed != oracle_committed:
        diff = sorted(committed ^ oracle_committed)
        errors.append(f"committed transactions differ from the oracle: {diff[:10]}")
    item = compare_snapshots(snapshot(final), snapshot(oracle))
    if item is not None:
        errors.append(f"final state differs from the oracle at {item}")
    return len(errors) == 0, errors


def run_workload(
    bench: Workbench,
    txns: Sequence[TxnSignature],
    config: EngineConfig | None = None,
    strategy: Strategy | str | None = None,
    *,
    verify: bool = True,
) -> BenchRun:
    """
    Run ``txns`` against ``bench.store`` bulk by bulk.

    Parameters
    ----------
    bench : Workbench
        Store and registry; the store is modified in place.
    txns : sequence of TxnSignature
        Transactions in id order.
    config : EngineConfig, optional
        Lanes, bulk formation, thresholds, arrival rate and interval.
    strategy : Strategy or "auto", optional
        Overrides ``config.strategy``.
    verify : bool, default True
        Check the final state against the sequential oracle. Runs of the
        relaxed strategies are not checked; they are serializable in some
        order other than the id order.

    Returns
    -------
    BenchRun
        A watchdog timeout stops the run; the report then carries the error
        and the metrics of the bulks completed before it.
    """
    config = config or EngineConfig()
    if strategy is not None:
        config = config.with_overrides({"strategy": strategy})
    store, registry = bench.store, bench.registry
    requested = str(config.strategy)
    relaxed = config.strategy != "auto" and Strategy(config.strategy).is_relaxed
    initial = store.copy() if verify and not relaxed else None

    pool = TxnPool(registry, next_id=txns[0].id if txns else 0)
    for sig in stamp_arrivals(txns, config.arrival_rate):
        pool.add(sig)
    generator = BulkGenerator(store, registry, pool, config)

    report = ExecReport(strategy=requested)
    outcomes: dict[int, TxnOutcome] = {}
    bulk_ids: list[list[int]] = []
    clock = 0.0
    with borrow_lanes(config.executor()) as lanes:
        while len(pool):
            now = _boundary(clock, config.interval)
            first = pool.peek(1)[0].submitted_at
            if first > now:
                clock = first
                continue
            bulk = generator.next_bulk(now)
            if not len(bulk):
                # nothing eligible at this boundary; wait for the next one
                clock = now + max(config.interval, 1e-9)
                continue
            try:
                result = execute_bulk(
                    bulk.strategy,
                    store,
                    registry,
                    bulk.txns,
                    config.executor(bulk.strategy),
                    footprint=bulk.footprint,
                    lanes=lanes,
                )
            except WatchdogTimeout as e:
                log.error("bulk timed out", bulk=len(report.bulks), error=str(e))
                report.error = f"watchdog timeout in bulk {len(report.bulks)}: {e}"
                break
            elapsed = bulk.generation_seconds + result.wall_seconds
            waits = [now - s.submitted_at for s in bulk.txns]
            report.bulks.append(
                BulkRecord(
                    index=len(report.bulks),
                    strategy=str(bulk.strategy),
                    bulk_size=len(bulk),
                    committed=result.committed,
                    aborted=result.aborted,
                    rolled_back=result.rolled_back,
                    generation_s=bulk.generation_seconds,
                    execution_s=result.wall_seconds,
                    divergence=bulk.divergence.total if bulk.divergence else 0,
                    rounds=result.rounds,
                    avg_response_s=max(sum(waits) / len(waits), 0.0) + elapsed,
                )
            )
            outcomes.update(result.outcomes)
            bulk_ids.append([s.id for s in bulk.txns])
            if result.rolled_back:
                log.warning("bulk rolled back transactions", rolled_back=result.rolled_back)
            log.info(
                "bulk executed",
                index=len(report.bulks) - 1,
                strategy=str(bulk.strategy),
                size=len(bulk),
                committed=result.committed,
                at=now,
            )
            clock = now + elapsed

    if initial is not None and report.error is None:
        ok, errors = verify_against_oracle(initial, store, bench, txns, outcomes, bulk_ids)
        report.verified = ok
        for message in errors:
            log.error("oracle check failed", detail=message)
    log.info(
        "benchmark finished",
        strategy=requested,
        bulks=len(report.bulks),
        committed=report.committed,
        throughput_ktps=round(report.throughput_ktps, 3),
        verified=report.verified,
    )
    return BenchRun(report, store, outcomes, bulk_ids)


def run_bench(
    path: str | os.PathLike[str],
    config: EngineConfig | None = None,
    strategy: Strategy | str | None = None,
    *,
    verify: bool = True,
) -> BenchRun:
    """Load a generated workload file, rebuild its workbench and run it."""
    bench, txns = load_workload(path)
    return run_workload(bench, txns, config, strategy, verify=verify)


def make_measure(bench: Workbench, config: EngineConfig | None = None) -> Measure:
    """
    Throughput measurement for :func:`~bulktx.planner.calibrate`.

    Each measurement runs the sample in ``auto`` mode on a fresh copy of
    ``bench.store`` without the oracle check.
    """
    base = config or EngineConfig()

    def measure(
        sample: Sequence[TxnSignature],
        *,
        passes: int,
        partition_size: int,
        thresholds: StrategyThresholds,
    ) -> float:
        setting = base.with_overrides(
            {
                "strategy": "auto",
                "passes": passes,
                "partition_size": partition_size,
                "w0_bar": thresholds.w0_bar,
                "c_bar": thresholds.c_bar,
                "d_bar": thresholds.d_bar,
            }
        )
        work = Workbench(bench.spec, bench.store.copy(), bench.registry)
        return run_workload(work, sample, setting, verify=False).report.throughput_ktps

    return measure
