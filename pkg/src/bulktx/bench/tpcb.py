"""
TPC-B-like workload.

One deposit type, as in pgbench: a random account of a random branch gets a
delta, the teller and the branch get the same delta and a history row is
appended. The branch id is the partition key, so the dependency graph
falls apart into one chain per branch.
"""

from __future__ import annotations

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

TELLERS_PER_BRANCH = 10
MAX_DELTA = 5000
DEPOSIT = 0


def _fixed(*names: str) -> tuple[ColumnDef, ...]:
    return tuple(ColumnDef(name=n) for n in names)


def schemas(spec: WorkloadSpec) -> list[TableSchema]:
    return [
        TableSchema(
            name="branch", columns=_fixed("id", "balance"), primary_key="id", partition_key="id"
        ),
        TableSchema(
            name="teller",
            columns=_fixed("id", "branch_id", "balance"),
            primary_key="id",
            partition_key="branch_id",
        ),
        TableSchema(
            name="account",
            columns=_fixed("id", "branch_id", "balance"),
            primary_key="id",
            partition_key="branch_id",
        ),
        TableSchema(
            name="history",
            columns=_fixed("id", "account_id", "teller_id", "branch_id", "delta"),
            primary_key="id",
            partition_key="branch_id",
        ),
    ]


def populate(store: ColumnStore, spec: WorkloadSpec) -> None:
    """``f`` branches, ten tellers and ``tuple_count`` accounts per branch."""
    for b in range(spec.scale_factor):
        store.append_row("branch", (b, 0))
        for t in range(TELLERS_PER_BRANCH):
            store.append_row("teller", (b * TELLERS_PER_BRANCH + t, b, 0))
        for a in range(spec.tuple_count):
            store.append_row("account", (b * spec.tuple_count + a, b, 0))


def _deposit(acc: StoreAccessor, params: Params) -> None:
    branch, teller, account, delta, history = (int(p) for p in params)
    # the insert is the only abort point and comes before any write
    acc.insert("history", (history, account, teller, branch, delta))
    acc.add("account", "balance", account, delta)
    acc.add("teller", "balance", teller, delta)
    acc.add("branch", "balance", branch, delta)


def _declare(fp: Footprint, params: Params) -> None:
    branch, teller, account, _, history = params
    fp.insert("history", history)
    fp.write("account", "balance", account)
    fp.write("teller", "balance", teller)
    fp.write("branch", "balance", branch)


def _root(fp: Footprint, params: Params) -> None:
    fp.lookup("branch", params[0])


def register(registry: TypeRegistry, spec: WorkloadSpec) -> None:
    registry.register_type(
        TxnType(
            type_id=DEPOSIT,
            name="deposit",
            procedure=_deposit,
            declared_ops=_declare,
            is_two_phase=True,
            partition_keys=lambda p: (int(p[0]),),
            root_locks=_root,
        )
    )


def generate(spec: WorkloadSpec) -> list[TxnSignature]:
    """
    Deposits with the branch drawn by ``alpha`` (branch 0) or uniformly.

    History ids are the transaction ids, so no two deposits insert the same
    key and the branch root lock dominates every conflicting access.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.txn_count
    hot = rng.random(n) < spec.alpha
    branches = np.where(hot, 0, rng.integers(0, spec.scale_factor, size=n))
    tellers = branches * TELLERS_PER_BRANCH + rng.integers(0, TELLERS_PER_BRANCH, size=n)
    accounts = branches * spec.tuple_count + rng.integers(0, spec.tuple_count, size=n)
    deltas = rng.integers(-MAX_DELTA, MAX_DELTA + 1, size=n)
    rows = zip(
        branches.tolist(), tellers.tolist(), accounts.tolist(), deltas.tolist(), strict=True
    )
    return [
        TxnSignature(i, DEPOSIT, (b, t, a, d, i)) for i, (b, t, a, d) in enumerate(rows)
    ]
