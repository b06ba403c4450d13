"""
Sequential reference execution and footprint validation.

:func:`execute_sequential` runs transactions one at a time in id order with
an undo log for every transaction. It defines the correct final state of a
bulk: every strategy must reproduce its snapshot and its outcome vector.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import structlog

from bulktx.exceptions import FootprintError, FootprintUnknown, SchedulingError
from bulktx.storage.column_store import merge_inserts
from bulktx.storage.items import table_item
from bulktx.storage.undo import UndoLog
from bulktx.txmodel.accessor import StoreAccessor, run_procedure
from bulktx.txmodel.footprint import DeclaredSet, declared_ops_of
from bulktx.txmodel.types import BasicOp, OpMode, TxnOutcome

if TYPE_CHECKING:
    from collections.abc import Collection, Sequence

    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()


def _check_order(txns: Sequence[TxnSignature]) -> None:
    for prev, cur in zip(txns, txns[1:], strict=False):
        if cur.id <= prev.id:
            raise SchedulingError(f"transactions out of id order: {prev.id} before {cur.id}")


def execute_sequential(
    store: ColumnStore,
    registry: TypeRegistry,
    txns: Sequence[TxnSignature],
    forced_aborts: Collection[int] = frozenset(),
    *,
    merge: bool = True,
) -> dict[int, TxnOutcome]:
    """
    Execute ``txns`` one at a time in id order.

    Parameters
    ----------
    store : ColumnStore
        Modified in place.
    registry : TypeRegistry
        Dispatch table.
    txns : sequence of TxnSignature
        Transactions in strictly increasing id order.
    forced_aborts : collection of int, optional
        Transactions treated as aborted without running them.
    merge : bool, default True
        Merge the insert buffer after the last transaction.

    Returns
    -------
    dict[int, TxnOutcome]
        Outcome per transaction id. Aborted transactions leave no writes.

    Raises
    ------
    SchedulingError
        If ``txns`` is not in increasing id order.
    """
    _check_order(txns)
    undo = UndoLog()
    outcomes: dict[int, TxnOutcome] = {}
    for sig in txns:
        if sig.id in forced_aborts:
            outcomes[sig.id] = TxnOutcome.ABORTED
            continue
        txn_type = registry.get(sig.type_id)
        undo.track(sig.id)
        acc = StoreAccessor(store, sig, undo=undo)
        if run_procedure(txn_type, acc, sig.params):
            undo.commit(sig.id)
            outcomes[sig.id] = TxnOutcome.COMMITTED
        else:
            undo.rollback(store, sig.id)
            outcomes[sig.id] = TxnOutcome.ABORTED
    if merge:
        merge_inserts(store)
    aborted = sum(1 for o in outcomes.values() if o is TxnOutcome.ABORTED)
    log.debug("sequential execution finished", txns=len(txns), aborted=aborted)
    return outcomes


def validate_footprints(
    store: ColumnStore, registry: TypeRegistry, txns: Sequence[TxnSignature]
) -> tuple[bool, list[str]]:
    """
    Run ``txns`` sequentially on a copy of ``store`` in strict trace mode.

    Every performed access must be covered by the declared footprint, no
    access may follow an abort, and two-phase types must not abort after
    writing.

    Returns
    -------
    tuple[bool, list[str]]
        (is_valid, list of error messages)
    """
    errors: list[str] = []
    work = store.copy()
    undo = UndoLog()
    for sig in txns:
        txn_type = registry.get(sig.type_id)
        try:
            declared = DeclaredSet(declared_ops_of(registry, work, sig))
        except FootprintUnknown as e:
            tables = e.tables or tuple(t.index for t in work.tables)
            declared = DeclaredSet(BasicOp(table_item(t), sig.id, OpMode.WRITE) for t in tables)
        undo.track(sig.id)
        acc = StoreAccessor(
            work, sig, undo=undo, declared=declared, strict=True, two_phase=txn_type.is_two_phase
        )
        try:
            committed = run_procedure(txn_type, acc, sig.params)
        except FootprintError as e:
            errors.append(f"txn {sig.id} ({txn_type.name}): {e}")
            committed = False
        if committed:
            undo.commit(sig.id)
        else:
            undo.rollback(work, sig.id)
    merge_inserts(work)
    return len(errors) == 0, errors
