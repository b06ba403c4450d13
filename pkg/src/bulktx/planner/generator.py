"""
Bulk generation from the transaction pool.

TPL and PART bulks are the oldest pending transactions, up to the maximum
bulk size. A K-SET bulk is the 0-set of the pending transactions; their
ranks are kept between calls and extended incrementally as transactions
arrive. In ``auto`` mode the strategy is chosen per bulk from the statistics
of the candidate bulk; when part of it has an unknown footprint TPL is used,
being the only strategy that is safe without a precise graph.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

import structlog

from bulktx.depgraph.ranks import RankState, compute_ranks
from bulktx.depgraph.stats import graph_stats
from bulktx.executors.config import Strategy
from bulktx.executors.part import partition_ids
from bulktx.planner.chooser import choose_strategy
from bulktx.planner.config import EngineConfig
from bulktx.planner.divergence import bulk_divergence
from bulktx.planner.grouping import group_by_type
from bulktx.txmodel.footprint import pool_footprint

if TYPE_CHECKING:
    from bulktx.depgraph.stats import GraphStats
    from bulktx.planner.divergence import DivergenceMetric
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.footprint import PoolFootprint
    from bulktx.txmodel.pool import TxnPool
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()


@dataclass
class Bulk:
    """
    One generated bulk.

    Attributes
    ----------
    txns : list[TxnSignature]
        Transactions in lane order (grouped by type when grouping is on).
    strategy : Strategy
        Strategy to execute the bulk with.
    footprint : PoolFootprint, optional
        Declared operations, when generation computed them.
    stats : GraphStats, optional
        Statistics the strategy was chosen from (``auto`` mode only).
    divergence : DivergenceMetric, optional
        Divergence of the lane order.
    generation_seconds : float
        Time spent forming the bulk.
    formed_at : float | None
        Logical time the bulk was formed at.
    """

    txns: list[TxnSignature]
    strategy: Strategy
    footprint: PoolFootprint | None = None
    stats: GraphStats | None = None
    divergence: DivergenceMetric | None = None
    generation_seconds: float = 0.0
    formed_at: float | None = None

    def __len__(self) -> int:
        return len(self.txns)


class BulkGenerator:
    """
    Forms bulks from a :class:`~bulktx.txmodel.TxnPool`.

    Parameters
    ----------
    store : ColumnStore
        Store footprints are resolved against.
    registry : TypeRegistry
        Registered transaction types.
    pool : TxnPool
        Source of pending transactions; bulks are removed from it.
    config : EngineConfig, optional
        Strategy, bulk size, grouping and thresholds.
    """

    def __init__(
        self,
        store: ColumnStore,
        registry: TypeRegistry,
        pool: TxnPool,
        config: EngineConfig | None = None,
    ) -> None:
        self.store = store
        self.registry = registry
        self.pool = pool
        self.config = config or EngineConfig()
        self._state: RankState | None = None
        self._ranked: set[int] = set()
        self._coarse = False
        self._key_version = store.key_version

    def _eligible(self, now: float | None) -> list[TxnSignature]:
        pending = self.pool.peek()
        if now is None:
            return pending
        eligible = []
        for sig in pending:
            if sig.submitted_at > now:
                break
            eligible.append(sig)
        return eligible

    def _choose(
        self, candidate: list[TxnSignature]
    ) -> tuple[Strategy, PoolFootprint, GraphStats | None]:
        fp = pool_footprint(self.registry, self.store, candidate)
        if fp.unknown:
            log.info("unknown footprints in candidate bulk, using tpl", unknown=len(fp.unknown))
            return Strategy.TPL, fp, None
        ids = [s.id for s in candidate]
        ranks = compute_ranks(fp.ops, ids)
        pids = partition_ids(self.registry, candidate, self.config.partition_size)
        stats = graph_stats(ranks, partitions=dict(zip(ids, pids, strict=True)))
        return choose_strategy(stats, self.config.thresholds(len(candidate))), fp, stats

    def _zero_set(self, eligible: list[TxnSignature]) -> list[int]:
        if self._state is not None and self.store.key_version != self._key_version:
            # footprints resolved against an outdated key index
            self._drop_state()
        new = [s for s in eligible if s.id not in self._ranked]
        new_ids = {s.id for s in new}
        if new:
            fp = pool_footprint(self.registry, self.store, new)
            self._coarse = self._coarse or bool(fp.unknown)
            if self._state is None or self._coarse:
                # table-wide items only conflict with the whole pool when computed together
                ranked = [s for s in eligible if s.id in self._ranked or s.id in new_ids]
                fp = pool_footprint(self.registry, self.store, ranked)
                self._state = RankState.from_ops(fp.ops, [s.id for s in ranked])
            else:
                self._state.add(fp.ops, [s.id for s in new])
            self._ranked.update(s.id for s in new)
            self._key_version = self.store.key_version
        if self._state is None:
            return []
        zero = self._state.extract_zero_set()
        self._ranked.difference_update(zero)
        if not len(self._state):
            self._state, self._coarse = None, False
        return zero

    def _drop_state(self) -> None:
        self._state = None
        self._ranked.clear()
        self._coarse = False

    def next_bulk(self, now: float | None = None, strategy: Strategy | None = None) -> Bulk:
        """
        Form the next bulk from transactions submitted up to ``now``.

        Parameters
        ----------
        now : float, optional
            Logical time; ``None`` makes every pending transaction eligible.
        strategy : Strategy, optional
            Overrides the configured strategy.

        Returns
        -------
        Bulk
            Possibly empty.
        """
        start = time.perf_counter()
        eligible = self._eligible(now)
        choice = strategy or self.config.strategy
        fp: PoolFootprint | None = None
        stats: GraphStats | None = None
        if choice == "auto":
            if not eligible:
                choice = Strategy.TPL
            else:
                choice, fp, stats = self._choose(eligible[: self.config.max_size])
        choice = Strategy(choice)

        if choice is Strategy.KSET:
            txns = self.pool.take_ids(self._zero_set(eligible))
            fp = None
        else:
            self._drop_state()
            txns = self.pool.take(min(len(eligible), self.config.max_size))

        if choice not in (Strategy.PART, Strategy.PART_RELAXED):
            txns = group_by_type(txns, self.config.grouping(len(self.registry)))
        bulk = Bulk(
            txns,
            choice,
            footprint=fp,
            stats=stats,
            divergence=bulk_divergence(txns, self.config.warp_size),
            generation_seconds=time.perf_counter() - start,
            formed_at=now,
        )
        log.debug("bulk generated", strategy=str(choice), size=len(txns), at=now)
        return bulk


def generate_bulk(
    store: ColumnStore,
    registry: TypeRegistry,
    pool: TxnPool,
    strategy: Strategy | str = "auto",
    max_size: int = 4096,
    *,
    now: float | None = None,
    config: EngineConfig | None = None,
) -> Bulk:
    """Form one bulk with a throwaway :class:`BulkGenerator`."""
    base = config or EngineConfig()
    config = base.with_overrides({"strategy": strategy, "max_size": max_size})
    return BulkGenerator(store, registry, pool, config).next_bulk(now)
