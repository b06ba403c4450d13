"""Transaction-type registry: the dispatch table of stored procedures."""

from __future__ import annotations

from typing import TYPE_CHECKING, Final

import structlog

from bulktx.exceptions import RegistrationError, UnknownTypeError
from bulktx.txmodel.footprint import declared_ops_of

if TYPE_CHECKING:
    from collections.abc import Iterator

    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.types import BasicOp, TxnSignature, TxnType

log = structlog.get_logger()

MAX_TYPE_ID: Final = (1 << 16) - 1


class TypeRegistry:
    """
    Registered transaction types keyed by type id.

    The registry is built during setup and frozen before execution starts;
    registering into a frozen registry is an error.
    """

    def __init__(self) -> None:
        self._types: dict[int, TxnType] = {}
        self._frozen = False

    def register_type(self, spec: TxnType) -> int:
        """
        Register a stored procedure under ``spec.type_id``.

        Returns
        -------
        int
            The registered type id.

        Raises
        ------
        RegistrationError
            If the id is out of range or already used, or the registry is frozen.
        """
        if self._frozen:
            raise RegistrationError("registry is frozen")
        if not 0 <= spec.type_id <= MAX_TYPE_ID:
            raise RegistrationError(f"type id {spec.type_id} out of range 0..{MAX_TYPE_ID}")
        if spec.type_id in self._types:
            raise RegistrationError(f"duplicate type id {spec.type_id}")
        self._types[spec.type_id] = spec
        log.debug("registered transaction type", type_id=spec.type_id, name=spec.name)
        return spec.type_id

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    def get(self, type_id: int) -> TxnType:
        try:
            return self._types[type_id]
        except KeyError:
            raise UnknownTypeError(type_id) from None

    def __contains__(self, type_id: object) -> bool:
        return type_id in self._types

    def __len__(self) -> int:
        return len(self._types)

    def __iter__(self) -> Iterator[TxnType]:
        return iter(self._types[t] for t in sorted(self._types))

    @property
    def type_ids(self) -> list[int]:
        return sorted(self._types)

    def declared_ops_of(self, store: ColumnStore, sig: TxnSignature) -> list[BasicOp]:
        """Declared operations of ``sig``; see :func:`bulktx.txmodel.footprint.declared_ops_of`."""
        return declared_ops_of(self, store, sig)

    def is_two_phase(self, type_id: int) -> bool:
        return self.get(type_id).is_two_phase
