"""
Data-oriented k-set computation.

The operations of a pool are sorted by (data item, transaction id), which
groups each item's accesses in timestamp order. Within a group, operations
form layers: a write is a layer of its own and consecutive reads share a
layer. Every operation depends on the whole previous layer of its group, so
a group scan assigns ranks; a transaction's depth is the maximum rank of its
operations, and the k-set is the set of transactions of depth k.

A single scan sees one item at a time and misses dependency chains that
cross items. The scan is therefore repeated, each pass seeded with the
previous pass's transaction depths, until the depths stop changing; the
first pass is the plain rule (write or write-after-write bumps the rank,
read-after-read keeps it), and the fixpoint is the longest-path depth in the
dependency graph.

Every step is a numpy array operation: a stable lexsort for grouping,
boundary masks, segmented cumulative sums and maxima for the scan, and a
second lexsort by (transaction, rank) for the per-transaction maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from bulktx.exceptions import SchedulingError
from bulktx.storage.items import DataItemId
from bulktx.txmodel.types import BasicOp, OpMode

if TYPE_CHECKING:
    from collections.abc import Iterable

log = structlog.get_logger()

_EMPTY = np.zeros(0, dtype=np.int64)


def _op_arrays(ops: Iterable[BasicOp]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ops = list(ops)
    items = np.fromiter((op.item.encode() for op in ops), dtype=np.int64, count=len(ops))
    txns = np.fromiter((op.txn_id for op in ops), dtype=np.int64, count=len(ops))
    writes = np.fromiter((op.mode is OpMode.WRITE for op in ops), dtype=np.bool_, count=len(ops))
    return items, txns, writes


def _sort_ops(
    items: np.ndarray, txns: np.ndarray, writes: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort by (item, txn) and fold duplicate (item, txn) pairs into one op."""
    if len(items) == 0:
        return _EMPTY, _EMPTY, np.zeros(0, dtype=np.bool_)
    order = np.lexsort((txns, items))
    items, txns, writes = items[order], txns[order], writes[order]
    first = np.ones(len(items), dtype=np.bool_)
    first[1:] = (items[1:] != items[:-1]) | (txns[1:] != txns[:-1])
    starts = np.flatnonzero(first)
    return items[starts], txns[starts], np.logical_or.reduceat(writes, starts)


@dataclass(frozen=True)
class _Layout:
    """Group and layer structure of a sorted op array; independent of depths."""

    head: np.ndarray
    lid: np.ndarray
    level: np.ndarray
    starts: np.ndarray
    layer_gid: np.ndarray
    layer_head: np.ndarray

    @classmethod
    def of(cls, items: np.ndarray, writes: np.ndarray) -> _Layout:
        n = len(items)
        head = np.ones(n, dtype=np.bool_)
        head[1:] = items[1:] != items[:-1]
        layer_start = head.copy()
        layer_start[1:] |= writes[1:] | writes[:-1]
        gid = np.cumsum(head) - 1
        lid = np.cumsum(layer_start) - 1
        level = lid - lid[head][gid]
        starts = np.flatnonzero(layer_start)
        return cls(head, lid, level, starts, gid[starts], head[starts])


def _scan(layout: _Layout, seeds: np.ndarray) -> np.ndarray:
    """
    Rank every op given per-op seed depths (the owning transaction's depth).

    rank = level + max(0, max over ops k in earlier layers of (seed_k - level_k)).
    """
    if len(layout.level) == 0:
        return _EMPTY
    lifted = np.maximum(seeds - layout.level, 0)
    per_layer = np.maximum.reduceat(lifted, layout.starts)
    big = int(per_layer.max()) + 1
    offset = layout.layer_gid * big
    prefix = np.maximum.accumulate(per_layer + offset) - offset
    before = np.zeros_like(prefix)
    before[1:] = prefix[:-1]
    before[layout.layer_head] = 0
    return layout.level + before[layout.lid]


def _txn_max(txn_idx: np.ndarray, ranks: np.ndarray, n_txns: int) -> np.ndarray:
    """Maximum rank per transaction: sort by (txn, rank), keep each group's last."""
    out = np.zeros(n_txns, dtype=np.int64)
    if len(ranks) == 0:
        return out
    order = np.lexsort((ranks, txn_idx))
    t = txn_idx[order]
    last = np.ones(len(t), dtype=np.bool_)
    last[:-1] = t[1:] != t[:-1]
    out[t[last]] = ranks[order][last]
    return out


def _fixpoint(
    layout: _Layout, txn_idx: np.ndarray, depths: np.ndarray
) -> tuple[np.ndarray, np.ndarray, int]:
    passes = 0
    while True:
        passes += 1
        ranks = _scan(layout, depths[txn_idx])
        updated = np.maximum(depths, _txn_max(txn_idx, ranks, len(depths)))
        if np.array_equal(updated, depths):
            return ranks, depths, passes
        depths = updated


@dataclass(frozen=True)
class RankTable:
    """
    Per-operation ranks and per-transaction depths of a pool.

    Attributes
    ----------
    items, txns, writes, ranks : np.ndarray
        One entry per operation, sorted by (encoded item, transaction id).
    txn_ids : np.ndarray
        Sorted transaction ids of the pool.
    depths : np.ndarray
        Depth of each transaction in ``txn_ids``.
    passes : int
        Scan passes until the depths reached their fixpoint.
    """

    items: np.ndarray
    txns: np.ndarray
    writes: np.ndarray
    ranks: np.ndarray
    txn_ids: np.ndarray
    depths: np.ndarray
    passes: int = 1

    def __len__(self) -> int:
        return len(self.txn_ids)

    @property
    def depth(self) -> int:
        """Depth of the dependency graph (0 for an empty pool)."""
        return int(self.depths.max()) if len(self.depths) else 0

    def depth_of(self, txn_id: int) -> int:
        i = int(np.searchsorted(self.txn_ids, txn_id))
        if i == len(self.txn_ids) or self.txn_ids[i] != txn_id:
            raise KeyError(txn_id)
        return int(self.depths[i])

    def depth_map(self) -> dict[int, int]:
        return {int(t): int(d) for t, d in zip(self.txn_ids, self.depths, strict=True)}

    def kset(self, k: int) -> list[int]:
        return [int(t) for t in self.txn_ids[self.depths == k]]

    def zero_set(self) -> list[int]:
        return self.kset(0)

    def ksets(self) -> list[list[int]]:
        """All k-sets for k = 0..depth; a disjoint cover of the pool."""
        if not len(self.txn_ids):
            return []
        return [self.kset(k) for k in range(self.depth + 1)]

    def basic_ops(self) -> list[BasicOp]:
        return [
            BasicOp(DataItemId.decode(int(i)), int(t), OpMode.WRITE if w else OpMode.READ)
            for i, t, w in zip(self.items, self.txns, self.writes, strict=True)
        ]

    def op_ranks(self) -> dict[tuple[DataItemId, int], int]:
        """Rank of each (item, transaction) operation."""
        return {
            (DataItemId.decode(int(i)), int(t)): int(r)
            for i, t, r in zip(self.items, self.txns, self.ranks, strict=True)
        }


def compute_ranks(ops: Iterable[BasicOp], txns: Iterable[int] = ()) -> RankTable:
    """
    Compute operation ranks and transaction depths.

    Parameters
    ----------
    ops : iterable of BasicOp
        Declared operations of the pool. Several operations of one transaction
        on one item fold into one, a write if any of them is.
    txns : iterable of int, optional
        Additional transaction ids with no operations; they land in the 0-set.

    Returns
    -------
    RankTable
    """
    items, txn_arr, writes = _sort_ops(*_op_arrays(ops))
    txn_ids = np.union1d(txn_arr, np.fromiter(txns, dtype=np.int64))
    txn_idx = np.searchsorted(txn_ids, txn_arr)
    layout = _Layout.of(items, writes)
    ranks, depths, passes = _fixpoint(layout, txn_idx, np.zeros(len(txn_ids), dtype=np.int64))
    log.debug("ranks computed", ops=len(items), txns=len(txn_ids), passes=passes)
    return RankTable(items, txn_arr, writes, ranks, txn_ids, depths, passes)


class RankState:
    """
    Incrementally maintained ranks of a changing pool.

    New operations are merged into the sorted arrays and only the groups they
    touch are rescanned; removing the 0-set shortens every longest path by
    exactly one, so the remaining depths are decremented in place.
    """

    def __init__(self) -> None:
        self._items = _EMPTY
        self._txns = _EMPTY
        self._writes = np.zeros(0, dtype=np.bool_)
        self._txn_ids = _EMPTY
        self._depths = _EMPTY

    @classmethod
    def from_ops(cls, ops: Iterable[BasicOp], txns: Iterable[int] = ()) -> RankState:
        state = cls()
        state.add(ops, txns)
        return state

    def __len__(self) -> int:
        return len(self._txn_ids)

    @property
    def txn_ids(self) -> list[int]:
        return [int(t) for t in self._txn_ids]

    def depth_map(self) -> dict[int, int]:
        return {int(t): int(d) for t, d in zip(self._txn_ids, self._depths, strict=True)}

    def add(self, ops: Iterable[BasicOp], txns: Iterable[int] = ()) -> None:
        """
        Add transactions and their operations.

        Raises
        ------
        SchedulingError
            If a transaction is already part of the state.
        """
        items, txn_arr, writes = _sort_ops(*_op_arrays(ops))
        new_ids = np.union1d(txn_arr, np.fromiter(txns, dtype=np.int64))
        if not len(new_ids):
            return
        if np.isin(new_ids, self._txn_ids).any():
            raise SchedulingError("transactions added twice to the rank state")

        if len(self._txn_ids) == 0 or new_ids[0] > self._txn_ids[-1]:
            # new ids follow every existing id: each new op goes to the end of its group
            pos = np.searchsorted(self._items, items, side="right")
            self._items = np.insert(self._items, pos, items)
            self._txns = np.insert(self._txns, pos, txn_arr)
            self._writes = np.insert(self._writes, pos, writes)
            self._txn_ids = np.concatenate([self._txn_ids, new_ids])
            self._depths = np.concatenate([self._depths, np.zeros(len(new_ids), np.int64)])
        else:
            self._items, self._txns, self._writes = _sort_ops(
                np.concatenate([self._items, items]),
                np.concatenate([self._txns, txn_arr]),
                np.concatenate([self._writes, writes]),
            )
            # an earlier id can deepen existing transactions anywhere: recompute all
            self._txn_ids = np.union1d(self._txn_ids, new_ids)
            self._depths = np.zeros(len(self._txn_ids), dtype=np.int64)
            items = self._items

        affected = np.isin(self._items, items)
        sub_items = self._items[affected]
        sub_idx = np.searchsorted(self._txn_ids, self._txns[affected])
        layout = _Layout.of(sub_items, self._writes[affected])
        _, self._depths, passes = _fixpoint(layout, sub_idx, self._depths)
        log.debug("rank state extended", txns=len(new_ids), rescanned=len(sub_items), passes=passes)

    def extract_zero_set(self) -> list[int]:
        """Remove and return the transactions of depth 0."""
        zero = self._depths == 0
        bulk = [int(t) for t in self._txn_ids[zero]]
        if not bulk:
            return bulk
        keep = ~np.isin(self._txns, self._txn_ids[zero])
        self._items = self._items[keep]
        self._txns = self._txns[keep]
        self._writes = self._writes[keep]
        self._txn_ids = self._txn_ids[~zero]
        self._depths = self._depths[~zero] - 1
        return bulk

    def table(self) -> RankTable:
        """Current ranks as a :class:`RankTable`."""
        txn_idx = np.searchsorted(self._txn_ids, self._txns)
        layout = _Layout.of(self._items, self._writes)
        ranks = _scan(layout, self._depths[txn_idx])
        return RankTable(
            self._items, self._txns, self._writes, ranks, self._txn_ids, self._depths.copy()
        )


def extract_zero_set(state: RankState) -> tuple[list[int], RankState]:
    """
    Split the 0-set off a pool.

    Returns
    -------
    tuple[list[int], RankState]
        The ids of the 0-set (the next bulk) and the residual state, updated in
        place; an empty state yields an empty bulk.
    """
    return state.extract_zero_set(), state
