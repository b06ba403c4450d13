"""
Lock-counter table.

One unsigned counter per lockable object. Counters serve two lock disciplines:

- keyed counter locks: a lane holding key ``k`` for a slot proceeds when the
  counter equals ``k`` and releases by incrementing it;
- 0/1 spin locks: acquire by compare-and-swap 0 -> 1, release by storing 0.

Small stores map every encoded item to its own counter. Large stores use a
fixed-size array indexed by a hash of the encoding; colliding items share a
counter, which merges their lock streams (still correct, less parallel).
"""

from __future__ import annotations

import threading
import time
from typing import TYPE_CHECKING, Final

import numpy as np

from bulktx.exceptions import WatchdogTimeout

if TYPE_CHECKING:
    from collections.abc import Callable

    from bulktx.storage.column_store import ColumnStore
    from bulktx.storage.items import DataItemId

DEFAULT_DIRECT_LIMIT: Final = 1 << 20
_GOLDEN: Final = 0x9E3779B97F4A7C15
_MASK64: Final = (1 << 64) - 1


class LockTable:
    """
    Counter array with atomic read-modify-write.

    Parameters
    ----------
    slots : int | None
        ``None`` for direct addressing (one counter per encoded item), otherwise the
        size of the hash-indexed counter array.
    spin_limit : int, default 64
        Busy-wait iterations before a waiter blocks on the table's condition.
    """

    def __init__(self, slots: int | None = None, spin_limit: int = 64) -> None:
        if slots is not None and slots < 1:
            raise ValueError("slots must be positive")
        self.slots = slots
        self.spin_limit = spin_limit
        self._cond = threading.Condition()
        self._direct: dict[int, int] = {}
        self._array = np.zeros(slots, dtype=np.uint64) if slots is not None else None

    @classmethod
    def for_store(
        cls, store: ColumnStore, direct_limit: int = DEFAULT_DIRECT_LIMIT, spin_limit: int = 64
    ) -> LockTable:
        """Direct addressing when the store has at most ``direct_limit`` cells."""
        cells = sum(t.row_count * (len(t.schema.columns) + 1) for t in store.tables)
        return cls(None if cells <= direct_limit else direct_limit, spin_limit=spin_limit)

    @property
    def is_direct(self) -> bool:
        return self._array is None

    def slot(self, item: DataItemId) -> int:
        """Map a data item to its counter slot."""
        code = item.encode()
        if self._array is None:
            return code
        return (((code * _GOLDEN) & _MASK64) >> 17) % len(self._array)

    def value(self, slot: int) -> int:
        if self._array is None:
            return self._direct.get(slot, 0)
        return int(self._array[slot])

    def _set(self, slot: int, value: int) -> None:
        if self._array is None:
            if value:
                self._direct[slot] = value
            else:
                self._direct.pop(slot, None)
        else:
            self._array[slot] = value

    def fetch_add(self, slot: int, delta: int = 1) -> int:
        """Atomically add ``delta``; return the previous value. Acts as a full fence."""
        with self._cond:
            old = self.value(slot)
            self._set(slot, old + delta)
            self._cond.notify_all()
            return old

    def compare_and_swap(self, slot: int, expected: int, new: int) -> int:
        """Atomically store ``new`` if the counter equals ``expected``; return the old value."""
        with self._cond:
            old = self.value(slot)
            if old == expected:
                self._set(slot, new)
                self._cond.notify_all()
            return old

    def store(self, slot: int, value: int) -> None:
        with self._cond:
            self._set(slot, value)
            self._cond.notify_all()

    def _spin(self, ready: Callable[[], bool], timeout: float) -> None:
        for _ in range(self.spin_limit):
            if ready():
                return
        deadline = time.monotonic() + timeout
        with self._cond:
            while not ready():
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise WatchdogTimeout("lock wait exceeded the watchdog bound")
                self._cond.wait(remaining)

    def wait_for_key(self, slot: int, key: int, timeout: float = 60.0) -> None:
        """Spin until the counter of ``slot`` equals ``key``."""
        self._spin(lambda: self.value(slot) == key, timeout)

    def acquire(self, slot: int, timeout: float = 60.0) -> None:
        """Take a 0/1 spin lock."""
        self._spin(lambda: self.compare_and_swap(slot, 0, 1) == 0, timeout)

    def release(self, slot: int) -> None:
        """Release a 0/1 spin lock."""
        self.store(slot, 0)

    def nonzero(self) -> dict[int, int]:
        """Slots whose counter is not zero."""
        if self._array is None:
            return dict(self._direct)
        return {int(s): int(self._array[s]) for s in np.flatnonzero(self._array)}

    def all_zero(self) -> bool:
        return not self.nonzero()

    def reset(self) -> None:
        with self._cond:
            self._direct.clear()
            if self._array is not None:
                self._array[:] = 0
