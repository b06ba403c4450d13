"""
Post-bulk rollback of marked transactions.

Under keyed locking an aborting transaction's writes may already have been
read by later transactions of the same bulk. :func:`recover` undoes every
marked transaction that wrote, together with its descendants in the
T-dependency graph, in reverse timestamp order. Without a graph (strategies
whose bulks hold no conflicting transactions) only the marked transactions
are undone.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import structlog

from bulktx.exceptions import RecoveryError
from bulktx.txmodel.types import TxnOutcome

if TYPE_CHECKING:
    from collections.abc import Mapping

    from bulktx.depgraph.graph import TDependencyGraph
    from bulktx.storage.column_store import ColumnStore
    from bulktx.storage.undo import UndoLog

log = structlog.get_logger()


def recover(
    store: ColumnStore,
    undo: UndoLog,
    outcomes: Mapping[int, TxnOutcome],
    graph: TDependencyGraph | None = None,
) -> dict[int, TxnOutcome]:
    """
    Undo marked transactions and, given ``graph``, everything that depends on them.

    Parameters
    ----------
    store : ColumnStore
        Repaired in place.
    undo : UndoLog
        Log of the bulk; marked transactions are the aborted ones.
    outcomes : mapping of int to TxnOutcome
        Statuses as executed.
    graph : TDependencyGraph, optional
        Dependency graph of the bulk, for cascading rollback.

    Returns
    -------
    dict[int, TxnOutcome]
        Updated statuses: marked transactions ``ABORTED``, cascaded ones
        ``ROLLED_BACK``.

    Raises
    ------
    RecoveryError
        If a transaction to undo wrote without undo records. The store is left
        untouched in that case.
    """
    marked = undo.marked()
    writers = [t for t in marked if undo.wrote(t)]
    cascaded: set[int] = set()
    if graph is not None:
        for t in writers:
            if t in graph.graph:
                cascaded |= graph.descendants(t)
    cascaded -= set(marked)
    victims = sorted(set(writers) | cascaded, reverse=True)

    missing = [t for t in victims if undo.wrote(t) and not undo.is_tracked(t)]
    if missing:
        raise RecoveryError(
            f"transactions {missing} wrote without undo records; "
            "a type registered as two-phase aborted after writing"
        )

    applied = sum(undo.rollback(store, t) for t in victims)
    result = dict(outcomes)
    for t in marked:
        result[t] = TxnOutcome.ABORTED
    for t in cascaded:
        result[t] = TxnOutcome.ROLLED_BACK
    if cascaded:
        log.warning(
            "cascading rollback", aborted=len(writers), rolled_back=len(cascaded), records=applied
        )
    elif victims:
        log.debug("aborted transactions undone", txns=len(victims), records=applied)
    return result


def settle(store: ColumnStore, undo: UndoLog, txn_id: int, committed: bool) -> TxnOutcome:
    """
    Finish one transaction: discard its undo records, or roll it back at once.

    Raises
    ------
    RecoveryError
        If an aborted transaction wrote without undo records.
    """
    if committed:
        undo.commit(txn_id)
        return TxnOutcome.COMMITTED
    if undo.wrote(txn_id) and not undo.is_tracked(txn_id):
        raise RecoveryError(
            f"txn {txn_id} aborted after writing without undo records; "
            "its type is registered as two-phase"
        )
    undo.rollback(store, txn_id)
    return TxnOutcome.ABORTED
