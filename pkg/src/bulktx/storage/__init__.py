"""
In-memory column store.

This package provides:
- field-granularity addressing (``DataItemId``) with a sortable integer encoding
- the column store, its insert buffer, and the batched insert merge
- the lock-counter table used by the locking strategies
- per-transaction undo logging
- snapshots for oracle comparison, persisted as Zarr groups
- the line-oriented schema/load file

Example usage:

    from bulktx.storage import parse_store, read_item, snapshot

    store = parse_store('''
    table account key=id
    column id fixed
    column balance fixed
    row 0 100
    ''')
    item = store.item("account", "balance", 0)
    assert read_item(store, item) == 100
"""

from bulktx.storage.column_store import (
    CellValue,
    ColumnStore,
    InsertBuffer,
    PendingRow,
    Table,
    merge_inserts,
    read_item,
    write_item,
)
from bulktx.storage.items import (
    KEY_COLUMN,
    TABLE_COLUMN,
    DataItemId,
    key_item,
    table_item,
)
from bulktx.storage.locks import LockTable
from bulktx.storage.schema import ColumnDef, TableSchema
from bulktx.storage.schema_io import dump_store, format_store, load_store, parse_store
from bulktx.storage.snapshot import (
    StoreSnapshot,
    TableSnapshot,
    compare_snapshots,
    load_snapshot,
    save_snapshot,
    snapshot,
)
from bulktx.storage.undo import (
    CellRecord,
    DeleteRecord,
    InsertRecord,
    TxnStatus,
    UndoLog,
)

__all__ = [
    "KEY_COLUMN",
    "TABLE_COLUMN",
    "CellRecord",
    "CellValue",
    "ColumnDef",
    "ColumnStore",
    "DataItemId",
    "DeleteRecord",
    "InsertBuffer",
    "InsertRecord",
    "LockTable",
    "PendingRow",
    "StoreSnapshot",
    "Table",
    "TableSchema",
    "TableSnapshot",
    "TxnStatus",
    "UndoLog",
    "compare_snapshots",
    "dump_store",
    "format_store",
    "key_item",
    "load_snapshot",
    "load_store",
    "merge_inserts",
    "parse_store",
    "read_item",
    "save_snapshot",
    "snapshot",
    "table_item",
    "write_item",
]
