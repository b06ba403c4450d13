"""Tests for worker lanes and keyed lock plans."""

from __future__ import annotations

import threading

import pytest

from bulktx.exceptions import WatchdogTimeout
from bulktx.executors import ExecutorConfig, LanePool, borrow_lanes, plan_keyed_locks
from bulktx.executors.keyed import KeyedLockRequest
from bulktx.storage import DataItemId, LockTable


class TestLanePool:
    """Tests for barrier-style task execution."""

    def test_results_in_task_order(self) -> None:
        """Results line up with the tasks."""
        with LanePool(3) as lanes:
            out = lanes.run([lambda lane, i=i: i * i for i in range(10)])
        assert out == [i * i for i in range(10)]
        assert lanes.txn_counts.sum() == 10

    def test_single_task_runs_inline(self) -> None:
        """A lone task runs on lane 0 in the calling thread."""
        caller = threading.get_ident()
        with LanePool(4) as lanes:
            lane, ident = lanes.run([lambda lane: (lane, threading.get_ident())])[0]
        assert (lane, ident) == (0, caller)

    def test_lane_ids_are_in_range(self) -> None:
        """Every task sees a lane id below the lane count."""
        with LanePool(4) as lanes:
            seen = lanes.run([lambda lane: lane for _ in range(20)])
        assert all(0 <= lane < 4 for lane in seen)

    def test_exceptions_propagate(self) -> None:
        """A failing task fails the run."""

        def boom(lane: int) -> None:
            raise RuntimeError("boom")

        with LanePool(2) as lanes, pytest.raises(RuntimeError, match="boom"):
            lanes.run([lambda lane: None, boom])

    def test_watchdog(self) -> None:
        """Tasks that never finish trip the watchdog."""
        release = threading.Event()
        lanes = LanePool(2, watchdog_seconds=0.05)
        try:
            with pytest.raises(WatchdogTimeout, match="unfinished"):
                lanes.run([lambda lane: release.wait(10.0) for _ in range(2)])
        finally:
            release.set()
            lanes.close()

    def test_invalid_lane_count(self) -> None:
        """At least one lane is needed."""
        with pytest.raises(ValueError, match="at least 1"):
            LanePool(0)

    def test_borrow_lanes(self) -> None:
        """Given lanes are lent as is; otherwise a pool is built and closed."""
        config = ExecutorConfig(lane_count=2, warp_size=2)
        with LanePool(3) as mine, borrow_lanes(config, mine) as lent:
            assert lent is mine
        with borrow_lanes(config) as built:
            assert built.lane_count == 2
            built.run([lambda lane: None, lambda lane: None])
        assert built._executor is None


class TestKeyedLockPlan:
    """Tests for lock-key assignment."""

    A = DataItemId(0, 1, 0)
    B = DataItemId(0, 1, 1)

    def test_keys_follow_transaction_order(self) -> None:
        """Each slot's lockers get keys 0, 1, ... by id."""
        locks = LockTable()
        objects = {5: {self.A: 1, self.B: None}, 2: {self.A: 2}, 9: {self.B: 1}}
        plan = plan_keyed_locks(objects, locks)
        a, b = locks.slot(self.A), locks.slot(self.B)
        assert plan.keys == {5: {a: 1, b: 0}, 2: {a: 0}, 9: {b: 1}}
        assert plan.totals == {a: 2, b: 2}
        assert plan.release_after[5] == {a: 1, b: None}
        assert plan.requests(5) == sorted([KeyedLockRequest(a, 1), KeyedLockRequest(b, 0)])

    def test_shared_slots_merge_counts(self) -> None:
        """Objects hashed to one slot share its key and add their counts."""
        locks = LockTable(slots=1)
        plan = plan_keyed_locks({0: {self.A: 1, self.B: 2}, 1: {self.A: 1, self.B: None}}, locks)
        assert plan.release_after == {0: {0: 3}, 1: {0: None}}
        assert plan.keys == {0: {0: 0}, 1: {0: 1}}

    def test_verify(self) -> None:
        """Counters must end at the locker counts."""
        locks = LockTable()
        plan = plan_keyed_locks({0: {self.A: 1}, 1: {self.A: 1}}, locks)
        slot = locks.slot(self.A)
        locks.fetch_add(slot)
        ok, errors = plan.verify(locks)
        assert not ok
        assert errors == [f"slot {slot}: counter 1, expected 2"]
        locks.fetch_add(slot)
        assert plan.verify(locks) == (True, [])
        locks.fetch_add(7)
        assert "does not lock" in plan.verify(locks)[1][0]

    def test_empty_plan(self) -> None:
        """Transactions without lock objects get no keys."""
        plan = plan_keyed_locks({3: {}}, LockTable())
        assert plan.keys == {3: {}}
        assert plan.totals == {}
