"""
Micro-benchmark workload.

Every type reads one tuple, runs the compute kernel on it and writes the
result back. Types differ only in the kernel's salt, so lanes of one
lock-step group running different types take different branches.
"""

from __future__ import annotations

from functools import partial
from typing import TYPE_CHECKING

import numpy as np

from bulktx.storage.schema import ColumnDef, TableSchema
from bulktx.txmodel.types import TxnSignature, TxnType

if TYPE_CHECKING:
    from bulktx.bench.workloads import WorkloadSpec
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.accessor import StoreAccessor
    from bulktx.txmodel.footprint import Footprint
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import Params

TABLE = "tuples"
KERNEL_CALLS_PER_WEIGHT = 100

_MASK = (1 << 63) - 1


def mix(value: int, rounds: int, salt: int = 0) -> int:
    """
    Integer mixing kernel; ``rounds`` iterations of xor-shift-multiply.

    The result stays in ``[0, 2**63)`` so it fits a fixed-length cell.

    >>> mix(1, 0)
    1
    >>> mix(1, 3) == mix(1, 3)
    True
    """
    h = (value ^ (salt * 0x9E3779B97F4A7C15)) & _MASK
    for _ in range(rounds):
        h ^= h >> 29
        h = (h * 0xBF58476D1CE4E5B9) & _MASK
        h ^= h >> 32
    return h


def schemas(spec: WorkloadSpec) -> list[TableSchema]:
    return [
        TableSchema(
            name=TABLE,
            columns=(ColumnDef(name="id"), ColumnDef(name="value")),
            primary_key="id",
            partition_key="id",
        )
    ]


def populate(store: ColumnStore, spec: WorkloadSpec) -> None:
    for key in range(spec.tuple_count):
        store.append_row(TABLE, (key, key))


def _update(acc: StoreAccessor, params: Params, *, rounds: int, salt: int) -> None:
    key = int(params[0])
    value = acc.read(TABLE, "value", key)
    acc.write(TABLE, "value", key, mix(int(value), rounds, salt))


def _declare(fp: Footprint, params: Params) -> None:
    fp.read(TABLE, "value", params[0]).write(TABLE, "value", params[0])


def _root(fp: Footprint, params: Params) -> None:
    fp.lookup(TABLE, params[0])


def register(registry: TypeRegistry, spec: WorkloadSpec) -> None:
    rounds = KERNEL_CALLS_PER_WEIGHT * spec.weight
    for type_id in range(spec.type_count):
        registry.register_type(
            TxnType(
                type_id=type_id,
                name=f"update_{type_id}",
                procedure=partial(_update, rounds=rounds, salt=type_id),
                declared_ops=_declare,
                is_two_phase=True,
                partition_keys=lambda p: (int(p[0]),),
                root_locks=_root,
            )
        )


def generate(spec: WorkloadSpec) -> list[TxnSignature]:
    """Types uniform over ``0..T-1``; tuple 0 with probability alpha, else uniform."""
    rng = np.random.default_rng(spec.seed)
    n = spec.txn_count
    type_ids = rng.integers(0, spec.type_count, size=n)
    hot = rng.random(n) < spec.alpha
    keys = np.where(hot, 0, rng.integers(0, spec.tuple_count, size=n))
    return [
        TxnSignature(i, int(t), (int(k),))
        for i, (t, k) in enumerate(zip(type_ids.tolist(), keys.tolist(), strict=True))
    ]
