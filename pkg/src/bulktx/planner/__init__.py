"""
Bulk planning.

- :func:`group_by_type`: radix grouping of a bulk by transaction type
- :func:`divergence_of`: distinct types per warp-sized chunk
- :func:`choose_strategy`: rule-based strategy choice from graph statistics
- :func:`calibrate`: grid search of passes, partition size and thresholds
- :class:`BulkGenerator`: forms bulks from the transaction pool
- :class:`EngineConfig`: the ``key = value`` configuration file
"""

from bulktx.planner.calibration import (
    CalibrationResult,
    CalibrationSpace,
    Measure,
    calibrate,
)
from bulktx.planner.chooser import StrategyThresholds, choose_strategy
from bulktx.planner.config import (
    EngineConfig,
    dump_config,
    format_config,
    load_config,
    parse_config,
)
from bulktx.planner.divergence import DivergenceMetric, bulk_divergence, divergence_of
from bulktx.planner.generator import Bulk, BulkGenerator, generate_bulk
from bulktx.planner.grouping import GroupingConfig, full_passes, group_by_type, group_order

__all__ = [
    "Bulk",
    "BulkGenerator",
    "CalibrationResult",
    "CalibrationSpace",
    "DivergenceMetric",
    "EngineConfig",
    "GroupingConfig",
    "Measure",
    "StrategyThresholds",
    "bulk_divergence",
    "calibrate",
    "choose_strategy",
    "divergence_of",
    "dump_config",
    "format_config",
    "full_passes",
    "generate_bulk",
    "group_by_type",
    "group_order",
    "load_config",
    "parse_config",
]
