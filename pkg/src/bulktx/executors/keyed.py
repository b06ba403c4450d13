"""
Keyed counter locks.

Every lock slot touched by a bulk gets one key per transaction that locks
it: the transaction's position, in id order, among the slot's lockers. A
lane proceeds on a slot when its counter equals the key and hands the slot
on by incrementing the counter, so conflicting accesses happen in timestamp
order and waits only ever point at smaller ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Mapping

    from bulktx.storage.items import DataItemId
    from bulktx.storage.locks import LockTable


class KeyedLockRequest(NamedTuple):
    slot: int
    key: int


@dataclass(frozen=True)
class KeyedLockPlan:
    """
    Lock keys and release points of a bulk.

    Attributes
    ----------
    keys : dict[int, dict[int, int]]
        Key per transaction and slot.
    release_after : dict[int, dict[int, int | None]]
        Declared accesses per transaction and slot after which the slot is
        released; ``None`` holds the slot until the transaction ends.
    totals : dict[int, int]
        Number of lockers per slot: the counter value once the bulk is done.
    """

    keys: dict[int, dict[int, int]]
    release_after: dict[int, dict[int, int | None]]
    totals: dict[int, int]

    def requests(self, txn_id: int) -> list[KeyedLockRequest]:
        return [KeyedLockRequest(s, k) for s, k in sorted(self.keys.get(txn_id, {}).items())]

    def verify(self, locks: LockTable) -> tuple[bool, list[str]]:
        """
        Check that every counter ended at its slot's locker count.

        Returns
        -------
        tuple[bool, list[str]]
            (is_valid, list of error messages)
        """
        errors: list[str] = []
        counters = locks.nonzero()
        for slot, total in sorted(self.totals.items()):
            value = counters.pop(slot, 0)
            if value != total:
                errors.append(f"slot {slot}: counter {value}, expected {total}")
        for slot, value in sorted(counters.items()):
            errors.append(f"slot {slot}: counter {value} on a slot the bulk does not lock")
        return len(errors) == 0, errors


def plan_keyed_locks(
    lock_objects: Mapping[int, Mapping[DataItemId, int | None]], locks: LockTable
) -> KeyedLockPlan:
    """
    Assign keys for ``lock_objects``.

    Parameters
    ----------
    lock_objects : mapping
        Per transaction id, its lock objects and the declared accesses covered
        by each (``None`` when unknown).
    locks : LockTable
        Maps lock objects to slots; objects sharing a slot share its keys.

    Returns
    -------
    KeyedLockPlan
    """
    release: dict[int, dict[int, int | None]] = {}
    for txn_id, objects in lock_objects.items():
        per_slot: dict[int, int | None] = {}
        for obj, count in objects.items():
            slot = locks.slot(obj)
            if slot in per_slot:
                prev = per_slot[slot]
                per_slot[slot] = None if prev is None or count is None else prev + count
            else:
                per_slot[slot] = count
        release[txn_id] = per_slot

    pairs = [(s, t) for t, per_slot in release.items() for s in per_slot]
    if not pairs:
        return KeyedLockPlan({t: {} for t in release}, release, {})
    slots = np.fromiter((s for s, _ in pairs), dtype=np.int64, count=len(pairs))
    txns = np.fromiter((t for _, t in pairs), dtype=np.int64, count=len(pairs))
    order = np.lexsort((txns, slots))
    slots, txns = slots[order], txns[order]

    head = np.ones(len(slots), dtype=np.bool_)
    head[1:] = slots[1:] != slots[:-1]
    starts = np.flatnonzero(head)
    group = np.cumsum(head) - 1
    key_arr = np.arange(len(slots)) - starts[group]

    keys: dict[int, dict[int, int]] = {t: {} for t in release}
    for s, t, k in zip(slots.tolist(), txns.tolist(), key_arr.tolist(), strict=True):
        keys[t][s] = k
    counts = np.diff(np.append(starts, len(slots)))
    totals = dict(zip(slots[starts].tolist(), counts.tolist(), strict=True))
    return KeyedLockPlan(keys, release, totals)
