"""
Per-transaction undo log.

Records are written only for transactions the executor chose to track (types
that are not two-phase, or everything under a strategy with cascading
rollback). Rolling a transaction back applies its records in reverse order.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Iterable

    from bulktx.storage.column_store import CellValue, ColumnStore, PendingRow
    from bulktx.storage.items import DataItemId


class TxnStatus(enum.StrEnum):
    COMMITTED = "committed"
    MARKED = "marked-for-rollback"


@dataclass(frozen=True)
class CellRecord:
    item: DataItemId
    prior: CellValue


@dataclass(frozen=True)
class InsertRecord:
    pending: PendingRow


@dataclass(frozen=True)
class DeleteRecord:
    table: int
    row: int


UndoRecord = CellRecord | InsertRecord | DeleteRecord


class UndoLog:
    """Undo records and rollback status per transaction."""

    def __init__(self, tracked: Iterable[int] = ()) -> None:
        self._records: dict[int, list[UndoRecord]] = {t: [] for t in tracked}
        self._status: dict[int, TxnStatus] = {}
        self._wrote: set[int] = set()
        self._lock = threading.Lock()

    def track(self, txn_id: int) -> None:
        with self._lock:
            self._records.setdefault(txn_id, [])

    def is_tracked(self, txn_id: int) -> bool:
        return txn_id in self._records

    def record(self, txn_id: int, entry: UndoRecord) -> None:
        """Append an undo record; untracked transactions only note that they wrote."""
        self._wrote.add(txn_id)
        records = self._records.get(txn_id)
        if records is not None:
            records.append(entry)

    def records(self, txn_id: int) -> list[UndoRecord]:
        return list(self._records.get(txn_id, ()))

    def wrote(self, txn_id: int) -> bool:
        """Whether the transaction performed any write, logged or not."""
        return txn_id in self._wrote

    def mark(self, txn_id: int) -> None:
        self._status[txn_id] = TxnStatus.MARKED

    def status(self, txn_id: int) -> TxnStatus:
        return self._status.get(txn_id, TxnStatus.COMMITTED)

    def marked(self) -> list[int]:
        return sorted(t for t, s in self._status.items() if s is TxnStatus.MARKED)

    def commit(self, txn_id: int) -> None:
        """Discard the transaction's records."""
        records = self._records.get(txn_id)
        if records is not None:
            records.clear()

    def rollback(self, store: ColumnStore, txn_id: int) -> int:
        """
        Restore everything ``txn_id`` wrote, in reverse order, and discard the records.

        Returns
        -------
        int
            Number of records applied.
        """
        records = self._records.get(txn_id, [])
        applied = len(records)
        for entry in reversed(records):
            match entry:
                case CellRecord(item=item, prior=prior):
                    store.write(item, prior)
                case InsertRecord(pending=pending):
                    store.insert_buffer.discard(pending)
                case DeleteRecord(table=table, row=row):
                    store.table(table).undelete(row)
        records.clear()
        self._wrote.discard(txn_id)
        return applied
