"""
Bulk-execution strategies on a pool of worker lanes.

- :func:`exec_tpl`: keyed counter locks in timestamp order, cascading rollback
- :func:`exec_part`: one lane per partition, lock-free
- :func:`exec_kset`: repeated lock-free execution of the 0-set
- :func:`exec_tpl_relaxed` / :func:`exec_part_relaxed`: serializable, not
  timestamp-ordered variants
- :func:`execute_bulk`: dispatch by :class:`Strategy`
"""

from bulktx.executors.config import ExecutorConfig, Strategy
from bulktx.executors.dispatch import execute_bulk
from bulktx.executors.keyed import KeyedLockPlan, KeyedLockRequest, plan_keyed_locks
from bulktx.executors.kset import exec_kset
from bulktx.executors.lanes import LanePool, borrow_lanes
from bulktx.executors.outcome import ExecOutcome
from bulktx.executors.part import (
    PartitionSchedule,
    build_partition_schedule,
    exclusive_prefix,
    exec_part,
    exec_part_relaxed,
    exec_part_relaxed_gen,
    exec_part_with_fallback,
    partition_ids,
)
from bulktx.executors.recovery import recover, settle
from bulktx.executors.tpl import exec_tpl, exec_tpl_relaxed
from bulktx.executors.trace import (
    AccessTrace,
    TraceEntry,
    check_conflict_order,
    format_trace,
    is_conflict_serializable,
    parse_trace,
    read_trace,
    serialization_graph,
    start_trace,
    write_trace,
)

__all__ = [
    "AccessTrace",
    "ExecOutcome",
    "ExecutorConfig",
    "KeyedLockPlan",
    "KeyedLockRequest",
    "LanePool",
    "PartitionSchedule",
    "Strategy",
    "TraceEntry",
    "borrow_lanes",
    "build_partition_schedule",
    "check_conflict_order",
    "exclusive_prefix",
    "exec_kset",
    "exec_part",
    "exec_part_relaxed",
    "exec_part_relaxed_gen",
    "exec_part_with_fallback",
    "exec_tpl",
    "exec_tpl_relaxed",
    "execute_bulk",
    "format_trace",
    "is_conflict_serializable",
    "parse_trace",
    "plan_keyed_locks",
    "read_trace",
    "recover",
    "serialization_graph",
    "settle",
    "start_trace",
    "write_trace",
]
