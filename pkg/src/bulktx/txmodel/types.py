"""
Core transaction-model types.

A transaction type is a stored procedure registered ahead of time together
with a declaration of the data items an instance will touch. Submitted
instances are :class:`TxnSignature` records whose id doubles as the
timestamp that fixes the serial order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from bulktx.storage.items import DataItemId
    from bulktx.txmodel.accessor import StoreAccessor
    from bulktx.txmodel.footprint import Footprint

ParamValue = int | str
Params = tuple[ParamValue, ...]


class OpMode(enum.StrEnum):
    READ = "R"
    WRITE = "W"


class BasicOp(NamedTuple):
    """A read or write of one data item by one transaction."""

    item: DataItemId
    txn_id: int
    mode: OpMode

    @property
    def is_write(self) -> bool:
        return self.mode is OpMode.WRITE

    def conflicts(self, other: BasicOp) -> bool:
        """Same item, different transactions, at least one write."""
        return (
            self.item == other.item
            and self.txn_id != other.txn_id
            and (self.is_write or other.is_write)
        )


class TxnOutcome(enum.StrEnum):
    COMMITTED = "committed"
    ABORTED = "aborted"
    ROLLED_BACK = "rolled-back"


@dataclass(frozen=True)
class TxnSignature:
    """
    A submitted transaction instance.

    Attributes
    ----------
    id : int
        Unique id, assigned in submission order; the transaction's timestamp.
    type_id : int
        Registered transaction type.
    params : tuple
        Parameter values (integers or strings).
    submitted_at : float
        Logical arrival time in seconds, used for response-time accounting.
    """

    id: int
    type_id: int
    params: Params = ()
    submitted_at: float = 0.0


@dataclass(frozen=True)
class TxnType:
    """
    A registered stored procedure.

    Attributes
    ----------
    type_id : int
        Small integer identifying the type; the dispatch key.
    name : str
        Human-readable name.
    procedure : callable
        ``procedure(accessor, params)``; performs reads, writes, inserts and
        deletes through the accessor and calls ``accessor.abort()`` to abort.
    declared_ops : callable
        ``declared_ops(footprint, params)``; declares every item an instance may
        touch on the :class:`~bulktx.txmodel.footprint.Footprint` builder.
        Over-declaration is allowed, under-declaration is a registration error.
        May raise :class:`~bulktx.exceptions.FootprintUnknown`.
    is_two_phase : bool
        The procedure reaches its abort decision before its first write, so it
        needs no undo log.
    partition_keys : callable, optional
        ``partition_keys(params)`` returns the partition-key values the instance
        touches. ``None`` marks the type as never single-partition.
    root_locks : callable, optional
        ``root_locks(footprint, params)`` declares the primary-key objects of the
        root relation that dominate every access of the instance; when every type
        of a bulk declares them, locking uses these objects only.
    """

    type_id: int
    name: str
    procedure: Callable[[StoreAccessor, Params], None]
    declared_ops: Callable[[Footprint, Params], object]
    is_two_phase: bool = False
    partition_keys: Callable[[Params], Sequence[int]] | None = field(default=None)
    root_locks: Callable[[Footprint, Params], object] | None = field(default=None)

    @property
    def is_single_partition(self) -> bool:
        return self.partition_keys is not None

    def partition_of(self, params: Params, partition_size: int = 1) -> int | None:
        """Partition id of an instance, or ``None`` if it spans several partitions."""
        if self.partition_keys is None:
            return None
        parts = {int(k) // partition_size for k in self.partition_keys(params)}
        if len(parts) != 1:
            return None
        return parts.pop()
