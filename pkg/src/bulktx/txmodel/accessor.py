"""
Store accessor: the interface stored procedures run against.

Procedures address cells by ``(table, column, primary key)``. The accessor
resolves rows through the primary-key index, keeps the undo log, records
the access trace, and in strict mode checks every access against the
transaction's declared footprint. Executors customize lock handling by
overriding :meth:`StoreAccessor._enter` and :meth:`StoreAccessor._leave`.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import TYPE_CHECKING, NoReturn

import structlog

from bulktx.exceptions import (
    FootprintError,
    MergeError,
    RowNotFoundError,
    TxnAbort,
    WatchdogTimeout,
)
from bulktx.storage.items import DataItemId, key_item
from bulktx.storage.undo import CellRecord, DeleteRecord, InsertRecord
from bulktx.txmodel.types import BasicOp, OpMode

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from bulktx.storage.column_store import CellValue, ColumnStore
    from bulktx.storage.undo import UndoLog
    from bulktx.txmodel.footprint import DeclaredSet
    from bulktx.txmodel.types import Params, TxnSignature, TxnType

log = structlog.get_logger()


class StoreAccessor:
    """
    Store access on behalf of one transaction.

    Parameters
    ----------
    store : ColumnStore
        The store the transaction runs against.
    sig : TxnSignature
        The transaction instance.
    undo : UndoLog, optional
        Undo log; records are kept only if the log tracks this transaction.
    declared : DeclaredSet, optional
        Declared footprint, checked in strict mode.
    strict : bool, default False
        Raise :class:`FootprintError` on undeclared accesses, accesses after an
        abort, and aborts of a two-phase transaction after its first write.
    two_phase : bool, default False
        Whether the transaction's type is registered as two-phase.
    recorder : callable, optional
        ``recorder(item, txn_id, mode, lane)`` called for every completed access.
    lane : int, default 0
        Worker lane executing the transaction.
    """

    def __init__(
        self,
        store: ColumnStore,
        sig: TxnSignature,
        *,
        undo: UndoLog | None = None,
        declared: DeclaredSet | None = None,
        strict: bool = False,
        two_phase: bool = False,
        recorder: Callable[[DataItemId, int, OpMode, int], None] | None = None,
        lane: int = 0,
    ) -> None:
        self.store = store
        self.sig = sig
        self.txn_id = sig.id
        self.undo = undo
        self.declared = declared
        self.strict = strict
        self.two_phase = two_phase
        self.recorder = recorder
        self.lane = lane
        self.aborted = False
        self.wrote = False
        self.performed: list[BasicOp] = []

    # lock hooks; the base accessor takes no locks

    def _enter(self, item: DataItemId, mode: OpMode) -> None:
        pass

    def _leave(self, item: DataItemId, mode: OpMode) -> None:
        pass

    def _begin(self, item: DataItemId, mode: OpMode) -> None:
        if self.strict:
            if self.aborted:
                raise FootprintError(f"txn {self.txn_id} accessed {item} after aborting", item)
            if self.declared is not None and not self.declared.covers(item, mode):
                raise FootprintError(
                    f"txn {self.txn_id} performed undeclared {mode.name.lower()} of {item}", item
                )
        self._enter(item, mode)
        if not (item.is_key or item.is_table):
            t = self.store.table(item.table)
            if not t.is_live(item.row):
                raise RowNotFoundError(t.name, t.key_of(item.row))

    def _end(self, item: DataItemId, mode: OpMode) -> None:
        self.performed.append(BasicOp(item, self.txn_id, mode))
        if self.recorder is not None:
            self.recorder(item, self.txn_id, mode, self.lane)
        self._leave(item, mode)

    def _log(self, entry: CellRecord | InsertRecord | DeleteRecord) -> None:
        self.wrote = True
        if self.undo is not None:
            self.undo.record(self.txn_id, entry)

    def _tracked(self) -> bool:
        return self.undo is not None and self.undo.is_tracked(self.txn_id)

    def _resolve(self, table: int | str, column: int | str, key: int) -> DataItemId:
        t = self.store.table(table)
        row = t.pk_index.get(key)
        if row is None:
            raise RowNotFoundError(t.name, key)
        col = t.schema.column_index(column) if isinstance(column, str) else column
        return DataItemId(t.index, col, row)

    def read(self, table: int | str, column: int | str, key: int) -> CellValue:
        """Read one field of the row with primary key ``key``."""
        item = self._resolve(table, column, key)
        self._begin(item, OpMode.READ)
        try:
            return self.store.read(item)
        finally:
            self._end(item, OpMode.READ)

    def write(self, table: int | str, column: int | str, key: int, value: CellValue) -> None:
        """Overwrite one field of the row with primary key ``key``."""
        item = self._resolve(table, column, key)
        self._begin(item, OpMode.WRITE)
        try:
            prior = self.store.read(item) if self._tracked() else 0
            self._log(CellRecord(item, prior))
            self.store.write(item, value)
        finally:
            self._end(item, OpMode.WRITE)

    def add(self, table: int | str, column: int | str, key: int, delta: int) -> int:
        """Read-modify-write of a fixed field; returns the new value."""
        item = self._resolve(table, column, key)
        self._begin(item, OpMode.WRITE)
        try:
            old = self.store.read(item)
            if not isinstance(old, int):
                raise TypeError(f"{item} is not a fixed-length field")
            self._log(CellRecord(item, old))
            self.store.write(item, old + delta)
            return old + delta
        finally:
            self._end(item, OpMode.WRITE)

    def lookup(self, table: int | str, key: int) -> bool:
        """Whether a live row with primary key ``key`` exists."""
        item = key_item(self.store.table(table).index, key)
        self._begin(item, OpMode.READ)
        try:
            return self.store.row_of(table, key) is not None
        finally:
            self._end(item, OpMode.READ)

    def insert(
        self, table: int | str, values: Sequence[CellValue] | Mapping[str, CellValue]
    ) -> None:
        """
        Stage a new row; it becomes visible after the insert merge.

        Aborts the transaction if the key is live or already pending.
        """
        t = self.store.table(table)
        if isinstance(values, Mapping):
            values = [values[c.name] for c in t.schema.columns]
        row = tuple(values)
        key = row[t.schema.primary_key_index]
        if not isinstance(key, int):
            raise TypeError("primary key values are integers")
        item = key_item(t.index, key)
        self._begin(item, OpMode.WRITE)
        try:
            if key in t.pk_index:
                duplicate = True
            else:
                try:
                    pending = self.store.insert_buffer.add(self.txn_id, t.index, key, row)
                    duplicate = False
                except MergeError:
                    duplicate = True
                else:
                    self._log(InsertRecord(pending))
        finally:
            self._end(item, OpMode.WRITE)
        if duplicate:
            self.abort(f"duplicate key {key} in '{t.name}'")

    def delete(self, table: int | str, key: int) -> None:
        """Delete the row with primary key ``key``; aborts if there is none."""
        t = self.store.table(table)
        kitem = key_item(t.index, key)
        self._begin(kitem, OpMode.WRITE)
        row = t.pk_index.get(key)
        if row is None:
            self._end(kitem, OpMode.WRITE)
            self.abort(f"no row with key {key} in '{t.name}'")
        cells = [DataItemId(t.index, c, row) for c in range(len(t.schema.columns))]
        entered: list[DataItemId] = []
        try:
            for cell in cells:
                self._begin(cell, OpMode.WRITE)
                entered.append(cell)
            self._log(DeleteRecord(t.index, row))
            t.delete(row)
        finally:
            for cell in reversed(entered):
                self._end(cell, OpMode.WRITE)
            self._end(kitem, OpMode.WRITE)

    def abort(self, reason: str = "aborted") -> NoReturn:
        """Abort the transaction."""
        if self.strict and self.two_phase and self.wrote:
            raise FootprintError(
                f"two-phase txn {self.txn_id} aborted after its first write ({reason})"
            )
        self.aborted = True
        raise TxnAbort(reason)


def run_procedure(txn_type: TxnType, acc: StoreAccessor, params: Params) -> bool:
    """
    Run a stored procedure through ``acc``.

    Returns
    -------
    bool
        ``True`` if the transaction committed. Runtime errors abort the
        transaction; footprint violations and watchdog timeouts propagate.
    """
    try:
        txn_type.procedure(acc, params)
    except TxnAbort as e:
        acc.aborted = True
        log.debug("transaction aborted", txn=acc.txn_id, reason=e.reason)
        return False
    except (FootprintError, WatchdogTimeout):
        raise
    except Exception as e:
        acc.aborted = True
        log.warning(
            "procedure failed, aborting", txn=acc.txn_id, type=txn_type.name, error=str(e)
        )
        return False
    return not acc.aborted
