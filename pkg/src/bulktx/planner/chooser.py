"""
Rule-based strategy choice.

Given the statistics of a candidate bulk (graph depth ``d``, 0-set size
``w0`` and cross-partition count ``c``):

- a large 0-set runs as K-SET;
- otherwise few cross-partition transactions or a deep graph run as PART;
- everything else runs as TPL.
"""

from __future__ import annotations

import structlog
from pydantic import BaseModel, Field

from bulktx.depgraph.stats import GraphStats
from bulktx.executors.config import Strategy

log = structlog.get_logger()


class StrategyThresholds(BaseModel):
    """
    Thresholds of the strategy rules.

    Attributes
    ----------
    w0_bar : int
        0-set size from which K-SET is chosen.
    c_bar : int
        Largest cross-partition count for PART.
    d_bar : int
        Graph depth from which PART is chosen.
    """

    w0_bar: int = Field(default=64, ge=1)
    c_bar: int = Field(default=0, ge=0)
    d_bar: int = Field(default=1, ge=1)

    model_config = {"frozen": True}

    @classmethod
    def defaults(cls, lane_count: int, bulk_size: int) -> StrategyThresholds:
        """``w0_bar`` = lanes, ``c_bar`` = 0, ``d_bar`` = bulk size / lanes."""
        return cls(w0_bar=lane_count, c_bar=0, d_bar=max(1, bulk_size // max(lane_count, 1)))


def choose_strategy(stats: GraphStats, thresholds: StrategyThresholds) -> Strategy:
    """
    Pick the strategy for a bulk with ``stats``.

    Examples
    --------
    >>> t = StrategyThresholds(w0_bar=1000, c_bar=16, d_bar=50)
    >>> choose_strategy(GraphStats(d=3, w0=5000, c=0), t)
    <Strategy.KSET: 'kset'>
    >>> choose_strategy(GraphStats(d=2, w0=10, c=100), t)
    <Strategy.TPL: 'tpl'>
    """
    if stats.w0 >= thresholds.w0_bar:
        choice = Strategy.KSET
    elif stats.c <= thresholds.c_bar or stats.d >= thresholds.d_bar:
        choice = Strategy.PART
    else:
        choice = Strategy.TPL
    log.debug("strategy chosen", strategy=str(choice), d=stats.d, w0=stats.w0, c=stats.c)
    return choice
