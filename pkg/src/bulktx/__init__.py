from bulktx._version import version as __version__
from bulktx.bench import (
    ExecReport,
    WorkloadSpec,
    build_workbench,
    emit_report,
    generate_workload,
    run_bench,
    run_workload,
)
from bulktx.depgraph import build_graph, compute_ranks, graph_stats
from bulktx.exceptions import BulkTxError
from bulktx.executors import ExecOutcome, ExecutorConfig, Strategy, execute_bulk
from bulktx.planner import BulkGenerator, EngineConfig, choose_strategy, load_config
from bulktx.storage import ColumnDef, ColumnStore, DataItemId, TableSchema, snapshot
from bulktx.txmodel import (
    TxnPool,
    TxnSignature,
    TxnType,
    TypeRegistry,
    execute_sequential,
)

__all__ = [
    "BulkGenerator",
    "BulkTxError",
    "ColumnDef",
    "ColumnStore",
    "DataItemId",
    "EngineConfig",
    "ExecOutcome",
    "ExecReport",
    "ExecutorConfig",
    "Strategy",
    "TableSchema",
    "TxnPool",
    "TxnSignature",
    "TxnType",
    "TypeRegistry",
    "WorkloadSpec",
    "__version__",
    "build_graph",
    "build_workbench",
    "choose_strategy",
    "compute_ranks",
    "emit_report",
    "execute_bulk",
    "execute_sequential",
    "generate_workload",
    "graph_stats",
    "load_config",
    "run_bench",
    "run_workload",
    "snapshot",
]
