"""Strategy dispatch."""

from __future__ import annotations

from typing import TYPE_CHECKING

from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.executors.kset import exec_kset
from bulktx.executors.part import exec_part_relaxed, exec_part_with_fallback
from bulktx.executors.tpl import exec_tpl, exec_tpl_relaxed

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bulktx.executors.lanes import LanePool
    from bulktx.executors.outcome import ExecOutcome
    from bulktx.executors.trace import AccessTrace
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.footprint import PoolFootprint
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnSignature


def execute_bulk(
    strategy: Strategy | str,
    store: ColumnStore,
    registry: TypeRegistry,
    bulk: Sequence[TxnSignature],
    config: ExecutorConfig | None = None,
    *,
    footprint: PoolFootprint | None = None,
    lanes: LanePool | None = None,
    trace: AccessTrace | None = None,
    merge: bool = True,
) -> ExecOutcome:
    """
    Execute ``bulk`` with ``strategy``.

    PART bulks holding cross-partition transactions run those through TPL;
    a K-SET bulk is executed as a pool, round by round.
    """
    strategy = Strategy(strategy)
    config = config or ExecutorConfig()
    match strategy:
        case Strategy.TPL:
            return exec_tpl(
                store,
                registry,
                bulk,
                config,
                footprint=footprint,
                lanes=lanes,
                trace=trace,
                merge=merge,
            )
        case Strategy.TPL_RELAXED:
            return exec_tpl_relaxed(
                store,
                registry,
                bulk,
                config,
                footprint=footprint,
                lanes=lanes,
                trace=trace,
                merge=merge,
            )
        case Strategy.PART:
            return exec_part_with_fallback(
                store, registry, bulk, config, lanes=lanes, trace=trace, merge=merge
            )
        case Strategy.PART_RELAXED:
            return exec_part_relaxed(
                store, registry, bulk, config, lanes=lanes, trace=trace, merge=merge
            )
        case Strategy.KSET:
            return exec_kset(
                store,
                registry,
                bulk,
                config,
                footprint=footprint,
                lanes=lanes,
                trace=trace,
                merge=merge,
            )
