"""
Transaction model.

Stored-procedure registry, transaction pool, footprint declaration, the store
accessor procedures run against, and the sequential reference executor.

Example usage:

    from bulktx.txmodel import TxnPool, TxnType, TypeRegistry, execute_sequential

    registry = TypeRegistry()
    registry.register_type(
        TxnType(
            type_id=0,
            name="deposit",
            procedure=lambda acc, p: acc.add("account", "balance", p[0], p[1]),
            declared_ops=lambda fp, p: fp.write("account", "balance", p[0]),
        )
    )
    pool = TxnPool(registry)
    pool.submit(0, (3, 10))
    outcomes = execute_sequential(store, registry, pool.take())
"""

from bulktx.txmodel.accessor import StoreAccessor, run_procedure
from bulktx.txmodel.footprint import (
    DeclaredSet,
    Footprint,
    PoolFootprint,
    declared_ops_of,
    pool_footprint,
    root_ops_of,
)
from bulktx.txmodel.pool import TxnPool
from bulktx.txmodel.registry import TypeRegistry
from bulktx.txmodel.sequential import execute_sequential, validate_footprints
from bulktx.txmodel.types import (
    BasicOp,
    OpMode,
    Params,
    ParamValue,
    TxnOutcome,
    TxnSignature,
    TxnType,
)
from bulktx.txmodel.workload_io import (
    Workload,
    WorkloadEntry,
    format_workload,
    parse_workload,
    read_workload,
    write_workload,
)

__all__ = [
    "BasicOp",
    "DeclaredSet",
    "Footprint",
    "OpMode",
    "ParamValue",
    "Params",
    "PoolFootprint",
    "StoreAccessor",
    "TxnOutcome",
    "TxnPool",
    "TxnSignature",
    "TxnType",
    "TypeRegistry",
    "Workload",
    "WorkloadEntry",
    "declared_ops_of",
    "execute_sequential",
    "format_workload",
    "parse_workload",
    "pool_footprint",
    "read_workload",
    "root_ops_of",
    "run_procedure",
    "validate_footprints",
    "write_workload",
]
