"""Tests for the lock-counter table and the undo log."""

from __future__ import annotations

import threading

import pytest

from bulktx.exceptions import StorageError, WatchdogTimeout
from bulktx.storage import (
    CellRecord,
    ColumnStore,
    DataItemId,
    DeleteRecord,
    InsertRecord,
    LockTable,
    TxnStatus,
    UndoLog,
    merge_inserts,
)


class TestLockTable:
    """Tests for counter operations."""

    def test_fetch_add_returns_previous(self) -> None:
        """fetch_add hands back the value before the increment."""
        locks = LockTable()
        slot = locks.slot(DataItemId(0, 1, 3))
        assert locks.fetch_add(slot) == 0
        assert locks.fetch_add(slot, 2) == 1
        assert locks.value(slot) == 3
        assert not locks.all_zero()

    def test_compare_and_swap(self) -> None:
        """CAS only stores on a match."""
        locks = LockTable()
        assert locks.compare_and_swap(5, 0, 1) == 0
        assert locks.compare_and_swap(5, 0, 7) == 1
        assert locks.value(5) == 1

    def test_reset(self) -> None:
        """Reset zeroes every counter."""
        locks = LockTable(slots=16)
        locks.fetch_add(3)
        locks.reset()
        assert locks.all_zero()

    def test_hashed_slots_are_in_range(self) -> None:
        """Hashed addressing stays inside the array."""
        locks = LockTable(slots=7)
        assert not locks.is_direct
        assert all(0 <= locks.slot(DataItemId(0, c, r)) < 7 for c in range(4) for r in range(50))

    def test_for_store_picks_addressing(self, bank_store: ColumnStore) -> None:
        """Small stores get one counter per item."""
        assert LockTable.for_store(bank_store).is_direct
        assert not LockTable.for_store(bank_store, direct_limit=4).is_direct

    def test_invalid_size(self) -> None:
        """A hashed table needs at least one slot."""
        with pytest.raises(ValueError, match="positive"):
            LockTable(slots=0)

    def test_wait_for_key(self) -> None:
        """A waiter proceeds once the counter reaches its key."""
        locks = LockTable(spin_limit=1)
        done = threading.Event()

        def waiter() -> None:
            locks.wait_for_key(9, 2, timeout=10.0)
            done.set()

        thread = threading.Thread(target=waiter)
        thread.start()
        locks.fetch_add(9)
        assert not done.wait(0.05)
        locks.fetch_add(9)
        thread.join(timeout=10.0)
        assert done.is_set()

    def test_wait_times_out(self) -> None:
        """A key that never arrives trips the watchdog."""
        locks = LockTable(spin_limit=1)
        with pytest.raises(WatchdogTimeout):
            locks.wait_for_key(1, 1, timeout=0.01)

    def test_spin_lock(self) -> None:
        """acquire blocks while the lock is held."""
        locks = LockTable(spin_limit=1)
        locks.acquire(4)
        with pytest.raises(WatchdogTimeout):
            locks.acquire(4, timeout=0.01)
        locks.release(4)
        locks.acquire(4, timeout=0.01)
        assert locks.value(4) == 1


class TestUndoLog:
    """Tests for undo records and rollback."""

    def test_untracked_writes_are_only_noted(self, bank_store: ColumnStore) -> None:
        """Untracked transactions keep no records."""
        undo = UndoLog(tracked=[1])
        undo.record(2, CellRecord(bank_store.item("account", "balance", 0), 100))
        assert undo.wrote(2)
        assert undo.records(2) == []
        assert not undo.is_tracked(2)

    def test_rollback_restores_in_reverse(self, bank_store: ColumnStore) -> None:
        """Cells, deletes and inserts are undone."""
        undo = UndoLog(tracked=[1])
        item = bank_store.item("account", "balance", 0)
        undo.record(1, CellRecord(item, 100))
        bank_store.write(item, 150)
        undo.record(1, CellRecord(item, 150))
        bank_store.write(item, 175)
        table = bank_store.table("account")
        table.delete(3)
        undo.record(1, DeleteRecord(table.index, 3))
        pending = bank_store.insert_buffer.add(1, table.index, 20, (20, 0, b""))
        undo.record(1, InsertRecord(pending))

        assert undo.rollback(bank_store, 1) == 4
        assert bank_store.read(item) == 100
        assert bank_store.lookup("account", 3) == 3
        assert merge_inserts(bank_store) == 0
        assert not undo.wrote(1)
        assert undo.records(1) == []

    def test_commit_discards_records(self, bank_store: ColumnStore) -> None:
        """Committed records cannot be rolled back."""
        undo = UndoLog()
        undo.track(3)
        item = bank_store.item("account", "balance", 1)
        undo.record(3, CellRecord(item, 100))
        bank_store.write(item, 1)
        undo.commit(3)
        assert undo.rollback(bank_store, 3) == 0
        assert bank_store.read(item) == 1

    def test_marking(self) -> None:
        """Marked transactions are listed in id order."""
        undo = UndoLog()
        undo.mark(5)
        undo.mark(2)
        assert undo.marked() == [2, 5]
        assert undo.status(5) is TxnStatus.MARKED
        assert undo.status(1) is TxnStatus.COMMITTED

    def test_undelete_of_live_row(self, bank_store: ColumnStore) -> None:
        """Undeleting a live row is an error."""
        with pytest.raises(StorageError, match="not a deleted row"):
            bank_store.table("account").undelete(0)
