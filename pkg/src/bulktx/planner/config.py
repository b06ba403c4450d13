"""
Engine configuration file.

A configuration file holds ``key = value`` lines; ``#`` starts a comment and
blank lines are ignored. ``none`` clears an optional key. Command-line
flags override file values through :meth:`EngineConfig.with_overrides`.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Literal

import structlog
from pydantic import BaseModel, Field, ValidationError

from bulktx.exceptions import ConfigError
from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.planner.chooser import StrategyThresholds
from bulktx.planner.grouping import GroupingConfig

if TYPE_CHECKING:
    import os
    from collections.abc import Mapping

log = structlog.get_logger()


class EngineConfig(BaseModel):
    """
    Every setting of a benchmark or engine run.

    Attributes
    ----------
    lane_count, warp_size, partition_size, spin_limit, watchdog_seconds
        Executor settings, see :class:`~bulktx.executors.ExecutorConfig`.
    bits_per_pass, passes
        Type grouping, see :class:`~bulktx.planner.GroupingConfig`.
    w0_bar, c_bar, d_bar
        Strategy thresholds; unset thresholds take their defaults per bulk.
    strategy
        A fixed strategy, or ``auto`` to choose one per bulk.
    max_size
        Largest bulk.
    interval
        Batching interval in logical seconds; 0 takes whatever is pending.
    arrival_rate
        Submissions per logical second; 0 submits everything at time 0.
    """

    lane_count: int = Field(default=64, ge=1)
    warp_size: int = Field(default=32, ge=1)
    partition_size: int = Field(default=128, ge=1)
    spin_limit: int = Field(default=64, ge=0)
    watchdog_seconds: float = Field(default=60.0, gt=0)
    bits_per_pass: int = Field(default=2, ge=1, le=16)
    passes: int | None = Field(default=None, ge=0)
    w0_bar: int | None = Field(default=None, ge=1)
    c_bar: int | None = Field(default=None, ge=0)
    d_bar: int | None = Field(default=None, ge=1)
    strategy: Strategy | Literal["auto"] = "auto"
    max_size: int = Field(default=4096, ge=1)
    interval: float = Field(default=0.0, ge=0)
    arrival_rate: float = Field(default=0.0, ge=0)

    model_config = {"extra": "forbid"}

    def executor(self, strategy: Strategy | None = None, *, trace: bool = False) -> ExecutorConfig:
        fixed = self.strategy if self.strategy != "auto" else Strategy.TPL
        return ExecutorConfig(
            lane_count=self.lane_count,
            warp_size=self.warp_size,
            partition_size=self.partition_size,
            strategy=strategy or fixed,
            spin_limit=self.spin_limit,
            watchdog_seconds=self.watchdog_seconds,
            trace=trace,
        )

    def grouping(self, type_count: int) -> GroupingConfig:
        return GroupingConfig(
            bits_per_pass=self.bits_per_pass, passes=self.passes, type_count=max(type_count, 1)
        )

    def thresholds(self, bulk_size: int) -> StrategyThresholds:
        """Configured thresholds, defaults filling the unset ones."""
        base = StrategyThresholds.defaults(self.lane_count, bulk_size)
        return StrategyThresholds(
            w0_bar=self.w0_bar if self.w0_bar is not None else base.w0_bar,
            c_bar=self.c_bar if self.c_bar is not None else base.c_bar,
            d_bar=self.d_bar if self.d_bar is not None else base.d_bar,
        )

    def with_overrides(self, overrides: Mapping[str, Any]) -> EngineConfig:
        """Copy with ``overrides`` applied; ``None`` values are ignored."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        try:
            return EngineConfig.model_validate({**self.model_dump(), **updates})
        except ValidationError as e:
            raise ConfigError(f"invalid configuration: {e}") from e


def parse_config(text: str) -> EngineConfig:
    """
    Parse ``key = value`` lines.

    Raises
    ------
    ConfigError
        On a malformed line, a repeated or unknown key, or an invalid value.
    """
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in EngineConfig.model_fields:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {lineno}: key '{key}' given twice")
        values[key] = None if value.lower() == "none" else value
    try:
        return EngineConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_config(path: str | os.PathLike[str]) -> EngineConfig:
    with open(path) as f:
        config = parse_config(f.read())
    log.debug("configuration loaded", path=str(path))
    return config


def format_config(config: EngineConfig) -> str:
    lines = []
    for key, value in config.model_dump(mode="json").items():
        lines.append(f"{key} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"


def dump_config(config: EngineConfig, path: str | os.PathLike[str]) -> None:
    with open(path, "w") as f:
        f.write(format_config(config))
