"""Executor configuration."""

from __future__ import annotations

import enum
from typing import Self

from pydantic import BaseModel, Field, model_validator


class Strategy(enum.StrEnum):
    """Bulk-execution strategies."""

    TPL = "tpl"
    PART = "part"
    KSET = "kset"
    TPL_RELAXED = "tpl-relaxed"
    PART_RELAXED = "part-relaxed"

    @property
    def is_relaxed(self) -> bool:
        """Relaxed strategies guarantee serializability but not timestamp order."""
        return self in (Strategy.TPL_RELAXED, Strategy.PART_RELAXED)


class ExecutorConfig(BaseModel):
    """
    Worker-lane and strategy settings.

    Attributes
    ----------
    lane_count : int
        Number of worker lanes (M).
    warp_size : int
        Lanes per lock-step group, used by the divergence metric.
    partition_size : int
        Partition-key values per partition for PART.
    strategy : Strategy
        Strategy used when none is chosen per bulk.
    spin_limit : int
        Busy-wait iterations before a lock waiter blocks.
    watchdog_seconds : float
        Bound on one bulk's execution and on any single lock wait.
    direct_lock_limit : int
        Largest store (in cells) that gets one lock counter per item.
    trace : bool
        Record the per-item access trace.
    """

    lane_count: int = Field(default=64, ge=1)
    warp_size: int = Field(default=32, ge=1)
    partition_size: int = Field(default=128, ge=1)
    strategy: Strategy = Strategy.TPL
    spin_limit: int = Field(default=64, ge=0)
    watchdog_seconds: float = Field(default=60.0, gt=0)
    direct_lock_limit: int = Field(default=1 << 20, ge=1)
    trace: bool = False

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_warp(self) -> Self:
        """Validate that full warps tile the lane pool."""
        if self.lane_count >= self.warp_size and self.lane_count % self.warp_size:
            raise ValueError(
                f"warp_size {self.warp_size} must divide lane_count {self.lane_count}"
            )
        return self
