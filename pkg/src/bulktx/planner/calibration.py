"""
Calibration of grouping passes, partition size and strategy thresholds.

The planner does not run workloads itself: :func:`calibrate` grid-searches
the candidate settings through an injected ``measure`` callable that
returns the throughput of one sample under one setting.
"""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, Protocol

import structlog
from pydantic import BaseModel, Field

from bulktx.planner.chooser import StrategyThresholds
from bulktx.planner.grouping import full_passes

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()

DEFAULT_PARTITION_SIZE = 128


class CalibrationSpace(BaseModel):
    """Candidate values of the grid search."""

    passes: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    partition_sizes: list[int] = Field(
        default_factory=lambda: [16, 32, 64, 128, 256, 512], min_length=1
    )
    thresholds: list[StrategyThresholds] = Field(
        default_factory=lambda: [StrategyThresholds()], min_length=1
    )


class CalibrationResult(BaseModel):
    """Best setting found, with its mean throughput over the samples."""

    passes: int = Field(ge=0)
    partition_size: int = Field(ge=1)
    thresholds: StrategyThresholds
    throughput: float | None = None
    measured: int = 0


class Measure(Protocol):
    def __call__(
        self,
        sample: Sequence[TxnSignature],
        *,
        passes: int,
        partition_size: int,
        thresholds: StrategyThresholds,
    ) -> float: ...


def calibrate(
    samples: Sequence[Sequence[TxnSignature]],
    space: CalibrationSpace,
    measure: Measure,
    *,
    type_count: int = 8,
    bits_per_pass: int = 2,
    default_thresholds: StrategyThresholds | None = None,
) -> CalibrationResult:
    """
    Grid-search ``space`` for the highest mean throughput over ``samples``.

    Ties keep the first setting in grid order, so the result is deterministic
    for a deterministic ``measure``.

    Parameters
    ----------
    samples : sequence of workloads
        Representative transaction sequences.
    space : CalibrationSpace
        Candidate settings.
    measure : callable
        ``measure(sample, passes=..., partition_size=..., thresholds=...)``
        returning throughput (higher is better).
    type_count, bits_per_pass : int
        Used for the default pass count when there is nothing to measure.
    default_thresholds : StrategyThresholds, optional
        Returned when there is nothing to measure.

    Returns
    -------
    CalibrationResult
    """
    samples = [s for s in samples if len(s)]
    if not samples:
        log.info("no calibration samples, using defaults")
        return CalibrationResult(
            passes=full_passes(type_count, bits_per_pass),
            partition_size=DEFAULT_PARTITION_SIZE,
            thresholds=default_thresholds or StrategyThresholds(),
        )

    best: CalibrationResult | None = None
    measured = 0
    for passes, size, thresholds in itertools.product(
        space.passes, space.partition_sizes, space.thresholds
    ):
        scores = [
            measure(s, passes=passes, partition_size=size, thresholds=thresholds) for s in samples
        ]
        measured += len(scores)
        mean = sum(scores) / len(scores)
        log.debug("calibration point", passes=passes, partition_size=size, throughput=mean)
        if best is None or best.throughput is None or mean > best.throughput:
            best = CalibrationResult(
                passes=passes, partition_size=size, thresholds=thresholds, throughput=mean
            )
    assert best is not None
    result = best.model_copy(update={"measured": measured})
    log.info(
        "calibration finished",
        passes=result.passes,
        partition_size=result.partition_size,
        throughput=result.throughput,
    )
    return result
