"""
Mixed read/write workload over one small table.

Keys ``0..n-1`` are the base rows every type but ``toggle`` works on;
keys ``n..2n-1`` are the toggle region, of which the even keys are loaded.
The types cover two-phase and late aborts, inserts and deletes, and a scan
whose footprint cannot be declared per row.
"""

from __future__ import annotations

from functools import partial
from typing import TYPE_CHECKING

import numpy as np

from bulktx.exceptions import FootprintUnknown
from bulktx.storage.schema import ColumnDef, TableSchema
from bulktx.txmodel.types import TxnSignature, TxnType

if TYPE_CHECKING:
    from collections.abc import Callable

    from bulktx.bench.workloads import WorkloadSpec
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.accessor import StoreAccessor
    from bulktx.txmodel.footprint import Footprint
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import Params

TABLE = "cells"

TRANSFER = 0
LATE_UPDATE = 1
READ_PAIR = 2
TOGGLE = 3
SCAN = 4

MIX = {TRANSFER: 0.35, LATE_UPDATE: 0.25, READ_PAIR: 0.2, TOGGLE: 0.15, SCAN: 0.05}


def schemas(spec: WorkloadSpec) -> list[TableSchema]:
    return [
        TableSchema(
            name=TABLE,
            columns=(ColumnDef(name="id"), ColumnDef(name="val")),
            primary_key="id",
            partition_key="id",
        )
    ]


def populate(store: ColumnStore, spec: WorkloadSpec) -> None:
    n = spec.tuple_count
    for key in range(n):
        store.append_row(TABLE, (key, key))
    for key in range(n, 2 * n, 2):
        store.append_row(TABLE, (key, key))


def _transfer(acc: StoreAccessor, params: Params) -> None:
    k1, k2, k3, fail = (int(p) for p in params)
    total = int(acc.read(TABLE, "val", k1)) + int(acc.read(TABLE, "val", k2))
    if fail:
        acc.abort("injected abort")
    acc.write(TABLE, "val", k3, total)


def _declare_transfer(fp: Footprint, params: Params) -> None:
    k1, k2, k3 = params[:3]
    fp.read(TABLE, "val", k1).read(TABLE, "val", k2).write(TABLE, "val", k3)


def _late_update(acc: StoreAccessor, params: Params) -> None:
    k1, k2, fail = (int(p) for p in params)
    acc.add(TABLE, "val", k1, 1)
    if fail:
        acc.abort("injected late abort")
    acc.add(TABLE, "val", k2, 1)


def _declare_late_update(fp: Footprint, params: Params) -> None:
    fp.write(TABLE, "val", params[0]).write(TABLE, "val", params[1])


def _read_pair(acc: StoreAccessor, params: Params) -> None:
    acc.read(TABLE, "val", int(params[0]))
    acc.read(TABLE, "val", int(params[1]))


def _declare_read_pair(fp: Footprint, params: Params) -> None:
    fp.read(TABLE, "val", params[0]).read(TABLE, "val", params[1])


def _toggle(acc: StoreAccessor, params: Params) -> None:
    key, fail = (int(p) for p in params)
    if fail:
        acc.abort("injected abort")
    if acc.lookup(TABLE, key):
        acc.delete(TABLE, key)
    else:
        acc.insert(TABLE, (key, key))


def _declare_toggle(fp: Footprint, params: Params) -> None:
    fp.lookup(TABLE, params[0]).delete(TABLE, params[0]).insert(TABLE, params[0])


def _scan(acc: StoreAccessor, params: Params, *, base: int) -> None:
    target, fail = (int(p) for p in params)
    total = sum(int(acc.read(TABLE, "val", k)) for k in range(base))
    if fail:
        acc.abort("injected abort")
    acc.write(TABLE, "val", target, total)


def _declare_scan(fp: Footprint, params: Params) -> None:
    raise FootprintUnknown("scan reads every base row", (fp.store.table(TABLE).index,))


def register(registry: TypeRegistry, spec: WorkloadSpec) -> None:
    def keys(count: int) -> Callable[[Params], tuple[int, ...]]:
        return lambda p: tuple(int(k) for k in p[:count])

    types = [
        TxnType(TRANSFER, "transfer", _transfer, _declare_transfer, True, keys(3)),
        TxnType(LATE_UPDATE, "late_update", _late_update, _declare_late_update, False, keys(2)),
        TxnType(READ_PAIR, "read_pair", _read_pair, _declare_read_pair, True, keys(2)),
        TxnType(TOGGLE, "toggle", _toggle, _declare_toggle, True, keys(1)),
        TxnType(SCAN, "scan", partial(_scan, base=spec.tuple_count), _declare_scan, True),
    ]
    for txn_type in types:
        registry.register_type(txn_type)


def generate(spec: WorkloadSpec) -> list[TxnSignature]:
    """Base keys are row 0 with probability alpha, else uniform."""
    rng = np.random.default_rng(spec.seed)
    n = spec.tuple_count
    type_ids = np.fromiter(MIX, dtype=np.int64)
    weights = np.fromiter(MIX.values(), dtype=np.float64)

    def base_key() -> int:
        return 0 if rng.random() < spec.alpha else int(rng.integers(n))

    out: list[TxnSignature] = []
    for i in range(spec.txn_count):
        type_id = int(rng.choice(type_ids, p=weights / weights.sum()))
        fail = int(rng.random() < spec.abort_rate)
        if type_id == TRANSFER:
            params: tuple[int, ...] = (base_key(), base_key(), base_key(), fail)
        elif type_id == LATE_UPDATE:
            params = (base_key(), base_key(), fail)
        elif type_id == READ_PAIR:
            params = (base_key(), base_key())
        elif type_id == TOGGLE:
            params = (n + int(rng.integers(n)), fail)
        else:
            params = (base_key(), fail)
        out.append(TxnSignature(i, type_id, params))
    return out
