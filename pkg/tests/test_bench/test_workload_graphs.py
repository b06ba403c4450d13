"""Tests for the dependency structure of generated workloads."""

from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING

import pytest

from bulktx.bench import WorkloadSpec, build_workbench, generate_workload, run_workload
from bulktx.depgraph import build_graph, compute_ranks, graph_stats
from bulktx.executors.part import partition_ids
from bulktx.planner import EngineConfig
from bulktx.txmodel import pool_footprint

if TYPE_CHECKING:
    from bulktx.depgraph import RankTable
    from bulktx.txmodel import PoolFootprint, TxnSignature


def ranked(
    spec: WorkloadSpec, partition_size: int = 1
) -> tuple[list[TxnSignature], PoolFootprint, RankTable, dict[int, int | None]]:
    bench = build_workbench(spec)
    txns = generate_workload(spec)
    fp = pool_footprint(bench.registry, bench.store, txns)
    ids = [s.id for s in txns]
    ranks = compute_ranks(fp.ops, ids)
    pids = partition_ids(bench.registry, txns, partition_size)
    return txns, fp, ranks, dict(zip(ids, pids, strict=True))


class TestMicroGraphs:
    """Tests for micro-benchmark skew."""

    def test_full_skew_is_one_chain(self) -> None:
        """With alpha 1 every transaction waits for the previous one."""
        spec = WorkloadSpec(alpha=1.0, txn_count=40, tuple_count=16)
        _, _, ranks, _ = ranked(spec)
        assert ranks.depth == 39
        assert ranks.zero_set() == [0]

    def test_uniform_large_table_is_shallow(self) -> None:
        """Uniform access over many tuples leaves few conflicts."""
        spec = WorkloadSpec(alpha=0.0, txn_count=64, tuple_count=1 << 16, seed=3)
        _, _, ranks, _ = ranked(spec)
        assert ranks.depth <= 1
        assert len(ranks.zero_set()) >= 60

    def test_default_setting(self) -> None:
        """The default micro setting has eight types of weight 16."""
        spec = WorkloadSpec()
        assert (spec.type_count, spec.weight) == (8, 16)


class TestTpcbGraphs:
    """Tests for branch partitioning."""

    def test_branches_form_disjoint_chains(self) -> None:
        """Each branch contributes one chain and nothing crosses branches."""
        spec = WorkloadSpec(kind="tpcb_like", scale_factor=4, tuple_count=8, txn_count=60)
        txns, fp, ranks, partitions = ranked(spec)
        stats = graph_stats(ranks, partitions=partitions)
        assert stats.c == 0
        assert stats.w0 == 4

        by_branch: dict[int, list[int]] = defaultdict(list)
        for sig in txns:
            by_branch[int(sig.params[0])].append(sig.id)
        expected = {(a, b) for chain in by_branch.values() for a, b in zip(chain, chain[1:])}
        assert build_graph(fp.ops, [s.id for s in txns]).edges == expected

    def test_single_branch_is_sequential(self) -> None:
        """With one branch the graph is a single chain."""
        spec = WorkloadSpec(kind="tpcb_like", scale_factor=1, tuple_count=8, txn_count=20)
        _, _, ranks, _ = ranked(spec)
        assert ranks.depth == 19


class TestTm1Aborts:
    """Tests for injected aborts."""

    @pytest.mark.slow
    def test_injected_abort_rate(self) -> None:
        """Injected and missing-row aborts stay in range and the oracle still agrees."""
        spec = WorkloadSpec(
            kind="tm1_like", tuple_count=50, txn_count=600, abort_rate=0.1, seed=8
        )
        config = EngineConfig(lane_count=8, warp_size=8, max_size=128)
        run = run_workload(build_workbench(spec), generate_workload(spec), config, "tpl")
        assert run.report.verified is True
        assert 0.1 * 600 <= run.report.aborted <= 0.5 * 600


class TestBulkSize:
    """Tests for bulk size limits."""

    def test_unit_bulks(self) -> None:
        """A max size of one runs every transaction as its own bulk."""
        spec = WorkloadSpec(alpha=0.9, weight=1, txn_count=12, tuple_count=8)
        config = EngineConfig(lane_count=4, warp_size=4, max_size=1)
        run = run_workload(build_workbench(spec), generate_workload(spec), config, "kset")
        assert run.report.bulk_sizes == [1] * 12
        assert run.report.verified is True
