"""Tests for the calibration grid search."""

from __future__ import annotations

from typing import TYPE_CHECKING

from bulktx.planner import CalibrationSpace, StrategyThresholds, calibrate
from bulktx.txmodel import TxnSignature

if TYPE_CHECKING:
    from collections.abc import Sequence

SAMPLES = [[TxnSignature(i, 0) for i in range(4)], [TxnSignature(i, 1) for i in range(6)]]


def peaked(
    sample: Sequence[TxnSignature],
    *,
    passes: int,
    partition_size: int,
    thresholds: StrategyThresholds,
) -> float:
    """Throughput peaking at two passes, partitions of 64 and w0_bar 8."""
    return 1000.0 - abs(passes - 2) * 10 - abs(partition_size - 64) - abs(thresholds.w0_bar - 8)


class TestCalibrate:
    """Tests for picking the best setting."""

    def test_finds_the_peak(self) -> None:
        """The highest mean throughput wins."""
        space = CalibrationSpace(
            thresholds=[StrategyThresholds(w0_bar=w) for w in (4, 8, 16)],
        )
        result = calibrate(SAMPLES, space, peaked)
        assert (result.passes, result.partition_size, result.thresholds.w0_bar) == (2, 64, 8)
        assert result.throughput == 1000.0
        assert result.measured == 5 * 6 * 3 * 2

    def test_ties_keep_the_first_point(self) -> None:
        """A flat measure returns the first grid point."""
        space = CalibrationSpace(passes=[3, 1], partition_sizes=[32, 16])
        result = calibrate(SAMPLES, space, lambda s, **kw: 5.0)
        assert (result.passes, result.partition_size) == (3, 32)

    def test_mean_over_samples(self) -> None:
        """Scores are averaged over the samples."""
        space = CalibrationSpace(passes=[0, 1], partition_sizes=[8])

        def measure(sample: Sequence[TxnSignature], *, passes: int, **kw: object) -> float:
            return float(len(sample) * (passes + 1))

        result = calibrate(SAMPLES, space, measure)
        assert result.passes == 1
        assert result.throughput == 10.0

    def test_no_samples(self) -> None:
        """Without samples the defaults come back unmeasured."""
        fallback = StrategyThresholds(w0_bar=32)
        result = calibrate(
            [[]], CalibrationSpace(), peaked, type_count=16, default_thresholds=fallback
        )
        assert result.passes == 2
        assert result.partition_size == 128
        assert result.thresholds == fallback
        assert result.throughput is None
        assert result.measured == 0
