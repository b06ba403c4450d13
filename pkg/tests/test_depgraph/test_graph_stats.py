"""Tests for dependency-graph statistics."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest
from pydantic import ValidationError

from bulktx.depgraph import GraphStats, build_graph, compute_ranks, graph_stats

if TYPE_CHECKING:
    from bulktx.txmodel import BasicOp


class TestGraphStats:
    """Tests for (d, w0, c)."""

    def test_dependency_example(self, dependency_example_ops: list[BasicOp]) -> None:
        """One vertex has two predecessors."""
        ranks = compute_ranks(dependency_example_ops)
        assert graph_stats(ranks) == GraphStats(d=2, w0=1, c=1)

    def test_with_explicit_graph(self, dependency_example_ops: list[BasicOp]) -> None:
        """A prebuilt graph gives the same counts."""
        ranks = compute_ranks(dependency_example_ops)
        dep = build_graph(dependency_example_ops)
        assert graph_stats(ranks, dep) == graph_stats(ranks)

    def test_with_partitions(self, dependency_example_ops: list[BasicOp]) -> None:
        """With partitions, c counts cross-partition transactions."""
        ranks = compute_ranks(dependency_example_ops)
        stats = graph_stats(ranks, partitions={1: 0, 2: None, 3: None, 4: 1})
        assert stats.c == 2

    def test_stats_are_frozen(self) -> None:
        """Stats are immutable and non-negative."""
        stats = GraphStats(d=0, w0=0, c=0)
        with pytest.raises(ValidationError):
            stats.d = 3  # type: ignore[misc]
        with pytest.raises(ValidationError):
            GraphStats(d=-1, w0=0, c=0)
