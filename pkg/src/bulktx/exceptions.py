"""Exception hierarchy for bulktx."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from bulktx.storage.items import DataItemId


class BulkTxError(Exception):
    """Base class for all engine errors."""


class StorageError(BulkTxError):
    """Raised for column-store failures."""


class AddressingError(StorageError, IndexError):
    """Raised when a data item does not address a live cell."""


class RowNotFoundError(StorageError, KeyError):
    """Raised when a primary key has no live row."""

    def __init__(self, table: str, key: int) -> None:
        super().__init__(f"no live row with key {key!r} in table '{table}'")
        self.table = table
        self.key = key

    def __str__(self) -> str:
        # KeyError quotes its argument otherwise
        return str(self.args[0])


class MergeError(StorageError):
    """Raised when merging the insert buffer would duplicate a primary key."""

    def __init__(self, table: str, key: int) -> None:
        super().__init__(f"duplicate primary key {key!r} in table '{table}'")
        self.table = table
        self.key = key


class SchemaError(StorageError):
    """Raised for malformed schema/load files."""


class RegistrationError(BulkTxError):
    """Raised for invalid transaction-type registrations."""


class UnknownTypeError(RegistrationError, KeyError):
    """Raised when a signature names a transaction type that is not registered."""

    def __init__(self, type_id: int) -> None:
        super().__init__(f"unknown transaction type {type_id}")
        self.type_id = type_id

    def __str__(self) -> str:
        return str(self.args[0])


class FootprintError(RegistrationError):
    """Raised when a procedure performs an access its declaration does not cover."""

    def __init__(self, message: str, item: DataItemId | None = None) -> None:
        super().__init__(message)
        self.item = item


class FootprintUnknown(BulkTxError):
    """
    Raised by a footprint declaration that cannot resolve its data items.

    ``tables`` names the table indexes the transaction may touch; empty means
    every table.
    """

    def __init__(self, message: str, tables: tuple[int, ...] = ()) -> None:
        super().__init__(message)
        self.tables = tables


class SchedulingError(BulkTxError):
    """Raised when a bulk is handed to a strategy that cannot run it."""


class RecoveryError(BulkTxError):
    """Raised when a marked transaction cannot be rolled back."""


class WatchdogTimeout(BulkTxError):
    """Raised when a bulk does not finish within the watchdog bound."""


class WorkloadError(BulkTxError):
    """Raised for invalid workload specifications or files."""


class ConfigError(BulkTxError):
    """Raised for invalid configuration files."""


class TxnAbort(Exception):  # noqa: N818
    """Control-flow signal raised by a procedure to abort its transaction."""

    def __init__(self, reason: str = "aborted") -> None:
        super().__init__(reason)
        self.reason = reason
