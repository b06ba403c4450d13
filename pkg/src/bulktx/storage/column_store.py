"""
In-memory column store.

Fixed-length columns are numpy int64 arrays; variable-length columns are a pair
of int64 arrays (offset, length) into a per-table byte pool. Rows are never
physically removed: a delete clears the row's liveness flag and its primary-key
index entry. New rows are staged in an :class:`InsertBuffer` and appended by
:func:`merge_inserts` between bulks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import structlog

from bulktx.exceptions import AddressingError, MergeError, RowNotFoundError, StorageError
from bulktx.storage.items import MAX_ROW, DataItemId

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping, Sequence

    from bulktx.storage.schema import TableSchema

log = structlog.get_logger()

CellValue = int | bytes

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1
_INITIAL_CAPACITY = 16


def _check_fixed(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int | np.integer):
        raise TypeError(f"fixed-length cells hold integers, got {type(value).__name__}")
    value = int(value)
    if not _INT64_MIN <= value <= _INT64_MAX:
        raise OverflowError(f"value {value} does not fit in int64")
    return value


def _check_var(value: object) -> bytes:
    if isinstance(value, str):
        return value.encode()
    if not isinstance(value, bytes | bytearray):
        raise TypeError(f"variable-length cells hold bytes, got {type(value).__name__}")
    return bytes(value)


class Table:
    """Storage for one table: column arrays, byte pool, liveness, primary-key index."""

    def __init__(self, index: int, schema: TableSchema) -> None:
        self.index = index
        self.schema = schema
        self.row_count = 0
        self.pk_index: dict[int, int] = {}
        # bumped whenever pk_index changes
        self.key_version = 0
        self._capacity = _INITIAL_CAPACITY
        self._live = np.zeros(self._capacity, dtype=np.bool_)
        self._fixed: dict[int, np.ndarray] = {}
        self._offsets: dict[int, np.ndarray] = {}
        self._lengths: dict[int, np.ndarray] = {}
        self._pool = bytearray()
        self._pool_lock = threading.Lock()
        for i, col in enumerate(schema.columns):
            if col.kind == "fixed":
                self._fixed[i] = np.zeros(self._capacity, dtype=np.int64)
            else:
                self._offsets[i] = np.zeros(self._capacity, dtype=np.int64)
                self._lengths[i] = np.zeros(self._capacity, dtype=np.int64)
        self._pk_col = schema.primary_key_index
        self._part_col = schema.partition_key_index

    @property
    def name(self) -> str:
        return self.schema.name

    @property
    def pool_size(self) -> int:
        return len(self._pool)

    def is_fixed(self, column: int) -> bool:
        return column in self._fixed

    def is_live(self, row: int) -> bool:
        return 0 <= row < self.row_count and bool(self._live[row])

    def live_rows(self) -> np.ndarray:
        return np.flatnonzero(self._live[: self.row_count])

    def _grow(self, needed: int) -> None:
        if needed <= self._capacity:
            return
        capacity = self._capacity
        while capacity < needed:
            capacity *= 2

        def grown(arr: np.ndarray) -> np.ndarray:
            out = np.zeros(capacity, dtype=arr.dtype)
            out[: self._capacity] = arr
            return out

        self._live = grown(self._live)
        self._fixed = {c: grown(a) for c, a in self._fixed.items()}
        self._offsets = {c: grown(a) for c, a in self._offsets.items()}
        self._lengths = {c: grown(a) for c, a in self._lengths.items()}
        self._capacity = capacity

    def _check_column(self, column: int) -> None:
        if not 0 <= column < len(self.schema.columns):
            raise AddressingError(f"column {column} out of range for table '{self.name}'")

    def _check_row(self, row: int) -> None:
        if not self.is_live(row):
            raise AddressingError(f"row {row} is not a live row of table '{self.name}'")

    def read(self, column: int, row: int) -> CellValue:
        self._check_column(column)
        self._check_row(row)
        if column in self._fixed:
            return int(self._fixed[column][row])
        start = int(self._offsets[column][row])
        return bytes(self._pool[start : start + int(self._lengths[column][row])])

    def write(self, column: int, row: int, value: object) -> None:
        self._check_column(column)
        self._check_row(row)
        if column in self._fixed:
            if column == self._pk_col:
                raise StorageError("primary-key cells are immutable; delete and insert instead")
            self._fixed[column][row] = _check_fixed(value)
            return
        data = _check_var(value)
        if len(data) <= int(self._lengths[column][row]):
            start = int(self._offsets[column][row])
            self._pool[start : start + len(data)] = data
        else:
            # relocate to the end of the pool; the old region becomes dead space
            with self._pool_lock:
                start = len(self._pool)
                self._pool.extend(data)
            self._offsets[column][row] = start
        self._lengths[column][row] = len(data)

    def append(self, values: Sequence[object]) -> int:
        """Append a live row and index its key; return the new row id."""
        if len(values) != len(self.schema.columns):
            raise StorageError(
                f"table '{self.name}' has {len(self.schema.columns)} columns, "
                f"got {len(values)} values"
            )
        key = _check_fixed(values[self._pk_col])
        if not 0 <= key <= MAX_ROW:
            raise StorageError(f"primary key {key} out of range")
        if key in self.pk_index:
            raise MergeError(self.name, key)
        row = self.row_count
        self._grow(row + 1)
        for i, value in enumerate(values):
            if i in self._fixed:
                self._fixed[i][row] = _check_fixed(value)
            else:
                data = _check_var(value)
                with self._pool_lock:
                    self._offsets[i][row] = len(self._pool)
                    self._pool.extend(data)
                self._lengths[i][row] = len(data)
        self._live[row] = True
        self.row_count = row + 1
        self.pk_index[key] = row
        self.key_version += 1
        return row

    def key_of(self, row: int) -> int:
        return int(self._fixed[self._pk_col][row])

    def partition_key_of(self, row: int) -> CellValue:
        self._check_row(row)
        return self.read(self._part_col, row)

    def delete(self, row: int) -> int:
        """Clear the liveness flag of ``row`` and drop its index entry; return its key."""
        self._check_row(row)
        key = self.key_of(row)
        self._live[row] = False
        del self.pk_index[key]
        self.key_version += 1
        return key

    def undelete(self, row: int) -> None:
        if not 0 <= row < self.row_count or self._live[row]:
            raise StorageError(f"row {row} of '{self.name}' is not a deleted row")
        key = self.key_of(row)
        self._live[row] = True
        self.pk_index[key] = row
        self.key_version += 1

    def row_values(self, row: int) -> tuple[CellValue, ...]:
        return tuple(self.read(c, row) for c in range(len(self.schema.columns)))

    def fixed_column(self, column: int) -> np.ndarray:
        return self._fixed[column][: self.row_count]

    def var_column(self, column: int) -> list[bytes]:
        offsets = self._offsets[column]
        lengths = self._lengths[column]
        return [
            bytes(self._pool[int(offsets[r]) : int(offsets[r]) + int(lengths[r])])
            for r in range(self.row_count)
        ]

    def live_mask(self) -> np.ndarray:
        return self._live[: self.row_count].copy()

    def copy(self) -> Table:
        other = Table(self.index, self.schema)
        other.row_count = self.row_count
        other.pk_index = dict(self.pk_index)
        other.key_version = self.key_version
        other._capacity = self._capacity
        other._live = self._live.copy()
        other._fixed = {c: a.copy() for c, a in self._fixed.items()}
        other._offsets = {c: a.copy() for c, a in self._offsets.items()}
        other._lengths = {c: a.copy() for c, a in self._lengths.items()}
        other._pool = bytearray(self._pool)
        return other


@dataclass(frozen=True)
class PendingRow:
    """A row staged by transaction ``txn_id``; ``seq`` orders a transaction's inserts."""

    txn_id: int
    seq: int
    table: int
    key: int
    values: tuple[CellValue, ...]


@dataclass
class InsertBuffer:
    """
    Rows awaiting the batched merge.

    Pending rows are invisible to reads. Their keys take part in duplicate
    detection so that a second insert of the same key fails before merge.
    """

    capacity: int = 1 << 20
    _rows: dict[tuple[int, int], PendingRow] = field(default_factory=dict)
    _keys: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)
    _next_seq: dict[int, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __len__(self) -> int:
        return len(self._rows)

    def has_key(self, table: int, key: int) -> bool:
        return (table, key) in self._keys

    def add(self, txn_id: int, table: int, key: int, values: tuple[CellValue, ...]) -> PendingRow:
        """Stage a row; raise :class:`MergeError` if ``key`` is already pending."""
        with self._lock:
            if (table, key) in self._keys:
                raise MergeError(f"table#{table}", key)
            if len(self._rows) >= self.capacity:
                raise StorageError(f"insert buffer full ({self.capacity} rows)")
            seq = self._next_seq.get(txn_id, 0)
            self._next_seq[txn_id] = seq + 1
            pending = PendingRow(txn_id, seq, table, key, values)
            self._rows[(txn_id, seq)] = pending
            self._keys[(table, key)] = (txn_id, seq)
            return pending

    def discard(self, pending: PendingRow) -> None:
        """Remove a staged row (undo of an insert)."""
        with self._lock:
            self._rows.pop((pending.txn_id, pending.seq), None)
            if self._keys.get((pending.table, pending.key)) == (pending.txn_id, pending.seq):
                del self._keys[(pending.table, pending.key)]

    def rows(self) -> list[PendingRow]:
        """Pending rows in merge order: by transaction id, then insertion sequence."""
        with self._lock:
            return [self._rows[k] for k in sorted(self._rows)]

    def clear(self) -> None:
        with self._lock:
            self._rows.clear()
            self._keys.clear()
            self._next_seq.clear()


class ColumnStore:
    """
    A set of tables addressed at field granularity.

    Parameters
    ----------
    schemas : sequence of TableSchema
        Table declarations; table indexes follow this order.
    insert_capacity : int, default 1 << 20
        Capacity of the insert buffer.
    """

    def __init__(self, schemas: Sequence[TableSchema], insert_capacity: int = 1 << 20) -> None:
        names = [s.name for s in schemas]
        if len(set(names)) != len(names):
            raise StorageError("duplicate table names")
        self.tables: list[Table] = [Table(i, s) for i, s in enumerate(schemas)]
        self._by_name = {t.name: t for t in self.tables}
        self.insert_buffer = InsertBuffer(capacity=insert_capacity)

    @property
    def schemas(self) -> list[TableSchema]:
        return [t.schema for t in self.tables]

    @property
    def key_version(self) -> int:
        """Changes whenever a primary-key index gains or loses a key."""
        return sum(t.key_version for t in self.tables)

    def table(self, ref: int | str) -> Table:
        """Return a table by index or name."""
        try:
            return self.tables[ref] if isinstance(ref, int) else self._by_name[ref]
        except (IndexError, KeyError):
            raise AddressingError(f"no table {ref!r}") from None

    def item(self, table: int | str, column: int | str, row: int) -> DataItemId:
        """Build a :class:`DataItemId` from names or indexes."""
        t = self.table(table)
        col = t.schema.column_index(column) if isinstance(column, str) else column
        return DataItemId(t.index, col, row)

    def read(self, item: DataItemId) -> CellValue:
        return self.table(item.table).read(item.column, item.row)

    def write(self, item: DataItemId, value: object) -> None:
        self.table(item.table).write(item.column, item.row, value)

    def lookup(self, table: int | str, key: int) -> int:
        """Return the live row holding primary key ``key``."""
        t = self.table(table)
        row = t.pk_index.get(key)
        if row is None:
            raise RowNotFoundError(t.name, key)
        return row

    def row_of(self, table: int | str, key: int) -> int | None:
        return self.table(table).pk_index.get(key)

    def append_row(self, table: int | str, values: Sequence[object] | Mapping[str, object]) -> int:
        """Append a row directly (loading); bypasses the insert buffer."""
        t = self.table(table)
        if not isinstance(values, list | tuple):
            values = [values[c.name] for c in t.schema.columns]  # type: ignore[call-overload]
        return t.append(values)

    def copy(self) -> ColumnStore:
        """Deep copy of tables; the insert buffer of the copy starts empty."""
        other = ColumnStore.__new__(ColumnStore)
        other.tables = [t.copy() for t in self.tables]
        other._by_name = {t.name: t for t in other.tables}
        other.insert_buffer = InsertBuffer(capacity=self.insert_buffer.capacity)
        return other

    def iter_items(self) -> Iterator[DataItemId]:
        """Every live cell address, in encoded order."""
        for t in self.tables:
            rows = t.live_rows()
            for c in range(len(t.schema.columns)):
                for r in rows:
                    yield DataItemId(t.index, c, int(r))


def read_item(store: ColumnStore, item: DataItemId) -> CellValue:
    """
    Return the current value of a data item.

    Raises
    ------
    AddressingError
        If ``item`` does not address a live cell.
    """
    return store.read(item)


def write_item(store: ColumnStore, item: DataItemId, value: object) -> None:
    """
    Overwrite a data item.

    Variable-length values longer than the current one are relocated to the end
    of the table's byte pool.

    Raises
    ------
    AddressingError
        If ``item`` does not address a live cell.
    """
    store.write(item, value)


def merge_inserts(store: ColumnStore, buf: InsertBuffer | None = None) -> int:
    """
    Append every pending row to its table and index it.

    Must be called between bulks. Rows are appended in (transaction id, insertion
    sequence) order, so the result does not depend on lane scheduling.

    Returns
    -------
    int
        Number of rows appended.

    Raises
    ------
    MergeError
        If a pending key is already live, or pending twice. The store is left
        unchanged and the buffer keeps its rows.
    """
    buf = store.insert_buffer if buf is None else buf
    rows = buf.rows()
    seen: set[tuple[int, int]] = set()
    for pending in rows:
        t = store.table(pending.table)
        if pending.key in t.pk_index or (pending.table, pending.key) in seen:
            raise MergeError(t.name, pending.key)
        seen.add((pending.table, pending.key))
    for pending in rows:
        store.table(pending.table).append(pending.values)
    buf.clear()
    if rows:
        log.debug("merged inserts", rows=len(rows))
    return len(rows)
