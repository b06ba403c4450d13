"""Throughput orderings over repeated runs."""

from __future__ import annotations

import numpy as np
import pytest

from bulktx.bench import WorkloadSpec, build_workbench, generate_workload, run_workload
from bulktx.planner import EngineConfig

RUNS = 5
# lanes are interpreter threads; K-SET must stay within this factor of TPL
KSET_SLACK = 0.5

SKEWED = WorkloadSpec(type_count=4, weight=1, alpha=0.9, tuple_count=64, txn_count=512, seed=9)
UNIFORM = SKEWED.model_copy(update={"alpha": 0.0, "tuple_count": 256, "txn_count": 256})


def median_ktps(spec: WorkloadSpec, config: EngineConfig, strategy: str) -> float:
    """Median throughput of ``RUNS`` unverified runs on fresh stores."""
    txns = generate_workload(spec)
    ktps = [
        run_workload(build_workbench(spec), txns, config, strategy, verify=False)
        .report.throughput_ktps
        for _ in range(RUNS)
    ]
    return float(np.median(ktps))


@pytest.fixture
def lanes16() -> EngineConfig:
    """Fixture providing sixteen lanes in one warp."""
    return EngineConfig(lane_count=16, warp_size=16, partition_size=16)


@pytest.mark.slow
class TestThroughputTrends:
    """Orderings between strategies and settings."""

    def test_kset_keeps_up_with_tpl_under_skew(self, lanes16: EngineConfig) -> None:
        """On a hot-tuple workload K-SET is not outrun by locking."""
        kset = median_ktps(SKEWED, lanes16, "kset")
        tpl = median_ktps(SKEWED, lanes16, "tpl")
        assert kset >= KSET_SLACK * tpl, (kset, tpl)

    def test_unit_bulks_are_slower(self, lanes16: EngineConfig) -> None:
        """One transaction per bulk pays the per-bulk cost every time."""
        unit = median_ktps(UNIFORM, lanes16.with_overrides({"max_size": 1}), "tpl")
        full = median_ktps(UNIFORM, lanes16, "tpl")
        assert unit < full, (unit, full)

    def test_partition_sweep_optimum(self, lanes16: EngineConfig) -> None:
        """The best partition size does at least as well as both ends of the grid."""
        sizes = [1, 4, 16, 64, 256]
        medians = [
            median_ktps(UNIFORM, lanes16.with_overrides({"partition_size": p}), "part")
            for p in sizes
        ]
        best = max(medians)
        assert best >= medians[0]
        assert best >= medians[-1]
        assert all(m > 0 for m in medians), dict(zip(sizes, medians, strict=True))
