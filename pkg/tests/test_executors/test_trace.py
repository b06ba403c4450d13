"""Tests for access traces and their checkers."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from bulktx.executors import (
    AccessTrace,
    ExecutorConfig,
    check_conflict_order,
    is_conflict_serializable,
    parse_trace,
    read_trace,
    serialization_graph,
    start_trace,
    write_trace,
)
from bulktx.storage import DataItemId
from bulktx.txmodel import OpMode

if TYPE_CHECKING:
    import pathlib

X = DataItemId(0, 1, 0)
Y = DataItemId(0, 1, 1)
R, W = OpMode.READ, OpMode.WRITE


def make_trace(*accesses: tuple[DataItemId, int, OpMode]) -> AccessTrace:
    trace = AccessTrace()
    for item, txn, mode in accesses:
        trace.record(item, txn, mode, lane=txn % 2)
    return trace


class TestAccessTrace:
    """Tests for recording and persistence."""

    def test_sequence_numbers_per_item(self) -> None:
        """Each item numbers its accesses from zero."""
        trace = make_trace((X, 0, W), (Y, 1, R), (X, 2, R))
        assert [e.seq for e in trace] == [0, 0, 1]
        assert [e.txn_id for e in trace.by_item()[X]] == [0, 2]
        assert trace.lane_txns() == {0: {0, 2}, 1: {1}}

    def test_write_and_read(self, tmp_path: pathlib.Path) -> None:
        """A written trace reads back entry for entry."""
        trace = make_trace((X, 0, W), (Y, 3, R), (X, 4, R))
        path = tmp_path / "bulk.trace"
        write_trace(trace, path)
        loaded = read_trace(path)
        assert loaded.entries == trace.entries
        loaded.record(X, 5, W, 0)
        assert loaded.entries[-1].seq == 2

    def test_malformed_line(self) -> None:
        """Bad lines raise ValueError with their position."""
        with pytest.raises(ValueError, match="line 2"):
            parse_trace("0 1 R 0 0\n0 1 Q 0 1\n")

    def test_start_trace(self) -> None:
        """Tracing starts only when asked for."""
        given = AccessTrace()
        assert start_trace(ExecutorConfig(), given) is given
        assert start_trace(ExecutorConfig()) is None
        assert isinstance(start_trace(ExecutorConfig(trace=True)), AccessTrace)


class TestCheckers:
    """Tests for order and serializability checks."""

    def test_ordered_trace(self) -> None:
        """Increasing ids on conflicts pass; reads may interleave."""
        trace = make_trace((X, 0, W), (X, 2, R), (X, 1, R), (X, 3, W))
        assert check_conflict_order(trace) == (True, [])

    def test_out_of_order_write(self) -> None:
        """A write after a later transaction's access is reported."""
        ok, errors = check_conflict_order(make_trace((X, 2, R), (X, 1, W)))
        assert not ok
        assert errors == ["t0.c1[0]: txn 1 write at seq 1 after conflicting access by txn 2"]

    def test_serializable_but_not_ordered(self) -> None:
        """A schedule equivalent to a non-id order is serializable."""
        trace = make_trace((X, 2, W), (X, 1, W), (Y, 2, R), (Y, 1, W))
        assert not check_conflict_order(trace)[0]
        assert is_conflict_serializable(trace)
        assert set(serialization_graph(trace).edges) == {(2, 1)}

    def test_cycle(self) -> None:
        """Crossed conflicts on two items are not serializable."""
        trace = make_trace((X, 1, W), (X, 2, W), (Y, 2, W), (Y, 1, W))
        assert not is_conflict_serializable(trace)
