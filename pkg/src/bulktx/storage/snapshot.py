"""
Store snapshots for oracle comparison.

A snapshot is an immutable copy of every table's live cells. Snapshots compare
exactly, and persist to a Zarr group so that the final state of one run can be
diffed against the sequential oracle's on disk.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from bulktx.storage.items import DataItemId
from bulktx.storage.schema import TableSchema

if TYPE_CHECKING:
    import os

    from bulktx.storage.column_store import ColumnStore

log = structlog.get_logger()


@dataclass(frozen=True)
class TableSnapshot:
    """Frozen contents of one table; rows are physical row ids, dead rows included."""

    schema: TableSchema
    live: np.ndarray
    fixed: dict[int, np.ndarray]
    var: dict[int, tuple[bytes, ...]]

    @property
    def row_count(self) -> int:
        return len(self.live)

    def column_values(self, column: int) -> np.ndarray | tuple[bytes, ...]:
        return self.fixed[column] if column in self.fixed else self.var[column]


@dataclass(frozen=True)
class StoreSnapshot:
    """Frozen contents of a whole store."""

    tables: tuple[TableSnapshot, ...]

    def checksum(self, table: int) -> str:
        """Digest of a table's live cells, stable across runs."""
        t = self.tables[table]
        digest = hashlib.sha256()
        rows = np.flatnonzero(t.live)
        digest.update(rows.astype(np.int64).tobytes())
        for c in range(len(t.schema.columns)):
            if c in t.fixed:
                digest.update(t.fixed[c][rows].astype(np.int64).tobytes())
            else:
                for r in rows:
                    value = t.var[c][int(r)]
                    digest.update(len(value).to_bytes(8, "little"))
                    digest.update(value)
        return digest.hexdigest()[:16]


def snapshot(store: ColumnStore) -> StoreSnapshot:
    """Capture the current state of ``store``; pending inserts are not part of it."""
    tables = []
    for t in store.tables:
        fixed = {}
        var = {}
        for c, col in enumerate(t.schema.columns):
            if col.kind == "fixed":
                fixed[c] = t.fixed_column(c).copy()
            else:
                var[c] = tuple(t.var_column(c))
        tables.append(TableSnapshot(t.schema, t.live_mask(), fixed, var))
    return StoreSnapshot(tuple(tables))


def _first_diff_row(a: TableSnapshot, b: TableSnapshot, column: int) -> int | None:
    n = max(a.row_count, b.row_count)
    live_a = np.zeros(n, dtype=np.bool_)
    live_b = np.zeros(n, dtype=np.bool_)
    live_a[: a.row_count] = a.live
    live_b[: b.row_count] = b.live
    both = live_a & live_b
    differs = live_a != live_b
    m = min(a.row_count, b.row_count)
    if column in a.fixed:
        differs[:m] |= both[:m] & (a.fixed[column][:m] != b.fixed[column][:m])
    else:
        va, vb = a.var[column], b.var[column]
        for r in np.flatnonzero(both[:m]):
            if va[int(r)] != vb[int(r)]:
                differs[r] = True
    hits = np.flatnonzero(differs)
    return int(hits[0]) if len(hits) else None


def compare_snapshots(a: StoreSnapshot, b: StoreSnapshot) -> DataItemId | None:
    """
    Compare two snapshots cell by cell over live rows.

    Returns
    -------
    DataItemId | None
        ``None`` when the snapshots are equal, otherwise the first differing item in
        (table, column, row) order. A row live in one snapshot only differs in
        every column.

    Raises
    ------
    ValueError
        If the snapshots were taken from stores with different schemas.
    """
    if [t.schema for t in a.tables] != [t.schema for t in b.tables]:
        raise ValueError("snapshots have different schemas")
    for index, (ta, tb) in enumerate(zip(a.tables, b.tables, strict=True)):
        for column in range(len(ta.schema.columns)):
            row = _first_diff_row(ta, tb, column)
            if row is not None:
                return DataItemId(index, column, row)
    return None


def save_snapshot(snap: StoreSnapshot, path: str | os.PathLike[str]) -> None:
    """
    Write a snapshot as a Zarr group.

    Each table becomes a sub-group holding a ``live`` array, one int64 array per
    fixed column, and ``<name>.offsets``/``<name>.lengths``/``<name>.pool`` arrays per
    variable-length column. The table schema is stored in the sub-group's attributes.
    """
    import zarr

    root = zarr.open_group(str(path), mode="w")
    root.attrs["tables"] = [t.schema.name for t in snap.tables]
    for t in snap.tables:
        group = root.create_group(t.schema.name)
        group.attrs["schema"] = t.schema.model_dump(mode="json")
        _write_array(group, "live", t.live.astype(np.bool_))
        for c, col in enumerate(t.schema.columns):
            if c in t.fixed:
                _write_array(group, col.name, t.fixed[c].astype(np.int64))
            else:
                values = t.var[c]
                lengths = np.array([len(v) for v in values], dtype=np.int64)
                offsets = np.zeros(len(values), dtype=np.int64)
                if len(values):
                    offsets[1:] = np.cumsum(lengths)[:-1]
                pool = np.frombuffer(b"".join(values), dtype=np.uint8)
                _write_array(group, f"{col.name}.offsets", offsets)
                _write_array(group, f"{col.name}.lengths", lengths)
                _write_array(group, f"{col.name}.pool", pool)
    log.info("snapshot written", path=str(path), tables=len(snap.tables))


def _write_array(group: Any, name: str, data: np.ndarray) -> None:
    arr = group.create_array(
        name=name, shape=data.shape, chunks=(max(len(data), 1),), dtype=data.dtype
    )
    if len(data):
        arr[...] = data


def load_snapshot(path: str | os.PathLike[str]) -> StoreSnapshot:
    """Read a snapshot written by :func:`save_snapshot`."""
    import zarr

    root = zarr.open_group(str(path), mode="r")
    tables = []
    for name in root.attrs["tables"]:
        group = root[name]
        schema = TableSchema.model_validate(group.attrs["schema"])
        live = np.asarray(group["live"][...], dtype=np.bool_)
        fixed: dict[int, np.ndarray] = {}
        var: dict[int, tuple[bytes, ...]] = {}
        for c, col in enumerate(schema.columns):
            if col.kind == "fixed":
                fixed[c] = np.asarray(group[col.name][...], dtype=np.int64)
            else:
                offsets = np.asarray(group[f"{col.name}.offsets"][...], dtype=np.int64)
                lengths = np.asarray(group[f"{col.name}.lengths"][...], dtype=np.int64)
                pool = np.asarray(group[f"{col.name}.pool"][...], dtype=np.uint8).tobytes()
                var[c] = tuple(
                    pool[int(o) : int(o) + int(n)] for o, n in zip(offsets, lengths, strict=True)
                )
        tables.append(TableSnapshot(schema, live, fixed, var))
    return StoreSnapshot(tuple(tables))
