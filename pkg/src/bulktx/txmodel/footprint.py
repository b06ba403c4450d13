"""
Footprint declaration.

A transaction type declares what an instance will touch by calling the
:class:`Footprint` builder with primary-key values; the builder resolves keys
to rows through the primary-key index. Keys with no live row resolve to the
key's lock object, since such an access can only fail and abort.

When a declaration cannot resolve its items it raises
:class:`~bulktx.exceptions.FootprintUnknown`; :func:`pool_footprint` then
coarsens every operation on the affected tables to the table-wide item.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import structlog

from bulktx.exceptions import FootprintUnknown
from bulktx.storage.items import MAX_ROW, DataItemId, key_item, table_item
from bulktx.txmodel.types import BasicOp, OpMode

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()


class Footprint:
    """Collects the declared items of one transaction instance."""

    def __init__(self, store: ColumnStore) -> None:
        self.store = store
        self._modes: dict[DataItemId, OpMode] = {}
        self._counts: dict[DataItemId, int] = {}

    def _add(self, item: DataItemId, mode: OpMode) -> None:
        if mode is OpMode.WRITE or item not in self._modes:
            self._modes[item] = mode
        self._counts[item] = self._counts.get(item, 0) + 1

    def _table_index(self, table: int | str) -> int:
        return self.store.table(table).index

    def _check_key(self, table: int | str, key: object) -> int:
        if isinstance(key, bool) or not isinstance(key, int) or not 0 <= key <= MAX_ROW:
            raise FootprintUnknown(
                f"key {key!r} cannot address table {table!r}", (self._table_index(table),)
            )
        return key

    def cell(self, table: int | str, column: int | str, key: object) -> DataItemId:
        """Resolve ``(table, column, key)`` to a data item."""
        t = self.store.table(table)
        k = self._check_key(table, key)
        row = t.pk_index.get(k)
        if row is None:
            return key_item(t.index, k)
        col = t.schema.column_index(column) if isinstance(column, str) else column
        return DataItemId(t.index, col, row)

    def read(self, table: int | str, column: int | str, key: object) -> Footprint:
        self._add(self.cell(table, column, key), OpMode.READ)
        return self

    def write(self, table: int | str, column: int | str, key: object) -> Footprint:
        self._add(self.cell(table, column, key), OpMode.WRITE)
        return self

    def lookup(self, table: int | str, key: object) -> Footprint:
        """Existence check on a primary-key value."""
        self._add(key_item(self._table_index(table), self._check_key(table, key)), OpMode.READ)
        return self

    def insert(self, table: int | str, key: object) -> Footprint:
        self._add(key_item(self._table_index(table), self._check_key(table, key)), OpMode.WRITE)
        return self

    def delete(self, table: int | str, key: object) -> Footprint:
        """A delete writes the key object and every field of the row."""
        t = self.store.table(table)
        k = self._check_key(table, key)
        self._add(key_item(t.index, k), OpMode.WRITE)
        row = t.pk_index.get(k)
        if row is not None:
            for c in range(len(t.schema.columns)):
                self._add(DataItemId(t.index, c, row), OpMode.WRITE)
        return self

    def whole_table(self, table: int | str, mode: OpMode = OpMode.WRITE) -> Footprint:
        """Declare the table-wide item."""
        self._add(table_item(self._table_index(table)), mode)
        return self

    def items(self) -> list[tuple[DataItemId, OpMode]]:
        return sorted(self._modes.items())

    def ops(self, txn_id: int) -> list[BasicOp]:
        return [BasicOp(item, txn_id, mode) for item, mode in self.items()]

    def counts(self) -> dict[DataItemId, int]:
        """Number of declared accesses per item."""
        return dict(self._counts)


class DeclaredSet:
    """Lookup over one transaction's declared operations."""

    def __init__(self, ops: Iterable[BasicOp]) -> None:
        self.modes: dict[DataItemId, OpMode] = {}
        for op in ops:
            if op.mode is OpMode.WRITE or op.item not in self.modes:
                self.modes[op.item] = op.mode

    def lock_object(self, item: DataItemId) -> DataItemId | None:
        """The declared item whose lock covers ``item``, if any."""
        if item in self.modes:
            return item
        coarse = table_item(item.table)
        if coarse in self.modes:
            return coarse
        return None

    def covers(self, item: DataItemId, mode: OpMode) -> bool:
        obj = self.lock_object(item)
        if obj is None:
            return False
        return mode is OpMode.READ or self.modes[obj] is OpMode.WRITE


def declared_ops_of(
    registry: TypeRegistry, store: ColumnStore, sig: TxnSignature
) -> list[BasicOp]:
    """
    Declared operations of one signature.

    Raises
    ------
    UnknownTypeError
        If the signature's type is not registered.
    FootprintUnknown
        If the declaration cannot resolve its items.
    """
    return _declare(registry, store, sig).ops(sig.id)


def _declare(registry: TypeRegistry, store: ColumnStore, sig: TxnSignature) -> Footprint:
    fp = Footprint(store)
    registry.get(sig.type_id).declared_ops(fp, sig.params)
    return fp


def root_ops_of(
    registry: TypeRegistry, store: ColumnStore, sig: TxnSignature
) -> list[BasicOp] | None:
    """Root-relation lock objects of a signature, or ``None`` if its type declares none."""
    txn_type = registry.get(sig.type_id)
    if txn_type.root_locks is None:
        return None
    fp = Footprint(store)
    txn_type.root_locks(fp, sig.params)
    return [BasicOp(item, sig.id, OpMode.WRITE) for item, _ in fp.items()]


@dataclass
class PoolFootprint:
    """
    Declared operations of a set of transactions.

    Attributes
    ----------
    ops : list[BasicOp]
        One operation per (item, transaction); a write when any declared access is.
    unknown : frozenset[int]
        Transactions whose declaration raised ``FootprintUnknown``.
    coarse_tables : frozenset[int]
        Tables whose operations were coarsened to the table-wide item.
    counts : dict
        Declared access count per transaction and item; absent for coarsened items.
    """

    ops: list[BasicOp]
    unknown: frozenset[int] = frozenset()
    coarse_tables: frozenset[int] = frozenset()
    counts: dict[int, dict[DataItemId, int]] = field(default_factory=dict)
    _by_txn: dict[int, list[BasicOp]] | None = field(default=None, repr=False)

    def by_txn(self) -> dict[int, list[BasicOp]]:
        if self._by_txn is None:
            grouped: dict[int, list[BasicOp]] = defaultdict(list)
            for op in self.ops:
                grouped[op.txn_id].append(op)
            self._by_txn = dict(grouped)
        return self._by_txn

    def declared(self, txn_id: int) -> DeclaredSet:
        return DeclaredSet(self.by_txn().get(txn_id, ()))


def _normalize(ops: Iterable[BasicOp]) -> list[BasicOp]:
    modes: dict[tuple[DataItemId, int], OpMode] = {}
    for op in ops:
        key = (op.item, op.txn_id)
        if op.mode is OpMode.WRITE or key not in modes:
            modes[key] = op.mode
    return [BasicOp(item, txn, mode) for (item, txn), mode in modes.items()]


def pool_footprint(
    registry: TypeRegistry, store: ColumnStore, txns: Sequence[TxnSignature]
) -> PoolFootprint:
    """
    Declared operations of ``txns``, coarsened where a declaration failed.

    A transaction whose footprint is unknown writes the table-wide item of every
    table it may touch, and every other operation on those tables is replaced by
    the same-mode operation on the table-wide item.
    """
    known: list[BasicOp] = []
    counts: dict[int, dict[DataItemId, int]] = {}
    unknown: dict[int, tuple[int, ...]] = {}
    for sig in txns:
        try:
            fp = _declare(registry, store, sig)
            known.extend(fp.ops(sig.id))
            counts[sig.id] = fp.counts()
        except FootprintUnknown as e:
            unknown[sig.id] = e.tables or tuple(t.index for t in store.tables)
            log.info("footprint unknown, coarsening", txn=sig.id, tables=unknown[sig.id])
    if not unknown:
        return PoolFootprint(_normalize(known), counts=counts)

    coarse = frozenset(t for tables in unknown.values() for t in tables)
    ops = [
        BasicOp(table_item(op.item.table), op.txn_id, op.mode) if op.item.table in coarse else op
        for op in known
    ]
    for txn_id, tables in unknown.items():
        ops.extend(BasicOp(table_item(t), txn_id, OpMode.WRITE) for t in tables)
    for per_item in counts.values():
        for item in [i for i in per_item if i.table in coarse]:
            del per_item[item]
    return PoolFootprint(_normalize(ops), frozenset(unknown), coarse, counts)
