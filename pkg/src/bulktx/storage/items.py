"""
Field-granularity data item addressing.

A data item is one cell of one table: ``(table, column, row)``. Two reserved
column indexes address lockable objects that are not cells:

- ``KEY_COLUMN``: the primary-key value ``row`` of ``table``. Lookups read it,
  inserts and deletes write it, so conflicting key operations are ordered even
  when the key has no live row.
- ``TABLE_COLUMN``: the whole table, used when a footprint is coarsened.

Items encode into a single non-negative 63-bit integer whose order is
(table, column, row) lexicographic, so sorting by the encoding groups the
operations of one item together.
"""

from __future__ import annotations

from typing import Final, NamedTuple

TABLE_BITS: Final = 8
COLUMN_BITS: Final = 8
ROW_BITS: Final = 47

MAX_TABLES: Final = 1 << TABLE_BITS
MAX_COLUMNS: Final = (1 << COLUMN_BITS) - 2
MAX_ROW: Final = (1 << ROW_BITS) - 1

KEY_COLUMN: Final = (1 << COLUMN_BITS) - 1
TABLE_COLUMN: Final = (1 << COLUMN_BITS) - 2

_ROW_MASK: Final = (1 << ROW_BITS) - 1
_COLUMN_MASK: Final = (1 << COLUMN_BITS) - 1


class DataItemId(NamedTuple):
    """Address of a cell (or a reserved lock object) in the column store."""

    table: int
    column: int
    row: int

    def encode(self) -> int:
        """Encode the triple as one integer preserving lexicographic order."""
        if not 0 <= self.table < MAX_TABLES:
            raise ValueError(f"table index {self.table} out of range")
        if not 0 <= self.column <= KEY_COLUMN:
            raise ValueError(f"column index {self.column} out of range")
        if not 0 <= self.row <= MAX_ROW:
            raise ValueError(f"row index {self.row} out of range")
        return (self.table << (COLUMN_BITS + ROW_BITS)) | (self.column << ROW_BITS) | self.row

    @classmethod
    def decode(cls, value: int) -> DataItemId:
        """Inverse of :meth:`encode`."""
        return cls(
            value >> (COLUMN_BITS + ROW_BITS),
            (value >> ROW_BITS) & _COLUMN_MASK,
            value & _ROW_MASK,
        )

    @property
    def is_key(self) -> bool:
        return self.column == KEY_COLUMN

    @property
    def is_table(self) -> bool:
        return self.column == TABLE_COLUMN

    def __str__(self) -> str:
        if self.is_key:
            return f"t{self.table}.key[{self.row}]"
        if self.is_table:
            return f"t{self.table}.*"
        return f"t{self.table}.c{self.column}[{self.row}]"


def key_item(table: int, key: int) -> DataItemId:
    """Lock object for primary-key value ``key`` of ``table``."""
    return DataItemId(table, KEY_COLUMN, key)


def table_item(table: int) -> DataItemId:
    """Coarse lock object covering all of ``table``."""
    return DataItemId(table, TABLE_COLUMN, 0)
