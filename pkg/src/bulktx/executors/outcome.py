"""Result of executing one bulk."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from bulktx.storage.snapshot import snapshot
from bulktx.txmodel.types import TxnOutcome

if TYPE_CHECKING:
    from collections.abc import Iterable

    from bulktx.executors.config import Strategy
    from bulktx.executors.trace import AccessTrace
    from bulktx.storage.column_store import ColumnStore
    from bulktx.storage.snapshot import StoreSnapshot


@dataclass
class ExecOutcome:
    """
    Per-transaction statuses and execution metrics of a bulk.

    Attributes
    ----------
    strategy : Strategy
        Strategy that executed the bulk.
    outcomes : dict[int, TxnOutcome]
        Status per transaction id.
    store : ColumnStore
        The store the bulk ran against; its state is the bulk's final state.
    wall_seconds : float
        Wall time of the execution, recovery included.
    rounds : int
        Parallel rounds (K-SET rounds, PART segments; 1 otherwise).
    lane_txn_counts : np.ndarray
        Tasks run per lane.
    trace : AccessTrace, optional
        Per-item access trace, when tracing was enabled.
    """

    strategy: Strategy
    outcomes: dict[int, TxnOutcome]
    store: ColumnStore
    wall_seconds: float = 0.0
    rounds: int = 1
    lane_txn_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    trace: AccessTrace | None = None

    def __len__(self) -> int:
        return len(self.outcomes)

    def status(self, txn_id: int) -> TxnOutcome:
        return self.outcomes[txn_id]

    def counts(self) -> Counter[TxnOutcome]:
        return Counter(self.outcomes.values())

    @property
    def committed(self) -> int:
        return self.counts()[TxnOutcome.COMMITTED]

    @property
    def aborted(self) -> int:
        return self.counts()[TxnOutcome.ABORTED]

    @property
    def rolled_back(self) -> int:
        return self.counts()[TxnOutcome.ROLLED_BACK]

    def not_committed(self) -> set[int]:
        """Transactions that left no effect: the forced aborts of an equivalent serial run."""
        return {t for t, o in self.outcomes.items() if o is not TxnOutcome.COMMITTED}

    def snapshot(self) -> StoreSnapshot:
        return snapshot(self.store)

    @classmethod
    def combine(cls, strategy: Strategy, parts: Iterable[ExecOutcome]) -> ExecOutcome:
        """Join the outcomes of consecutive segments of one bulk."""
        parts = list(parts)
        if not parts:
            raise ValueError("nothing to combine")
        outcomes: dict[int, TxnOutcome] = {}
        for p in parts:
            outcomes.update(p.outcomes)
        width = max(len(p.lane_txn_counts) for p in parts)
        lanes = np.zeros(width, dtype=np.int64)
        for p in parts:
            lanes[: len(p.lane_txn_counts)] += p.lane_txn_counts
        traces = [p.trace for p in parts if p.trace is not None]
        return cls(
            strategy,
            outcomes,
            parts[0].store,
            wall_seconds=sum(p.wall_seconds for p in parts),
            rounds=sum(p.rounds for p in parts),
            lane_txn_counts=lanes,
            trace=traces[0] if traces else None,
        )
