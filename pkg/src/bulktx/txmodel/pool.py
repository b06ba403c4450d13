"""Transaction pool: submitted signatures awaiting bulk generation."""

from __future__ import annotations

import threading
from collections import deque
from typing import TYPE_CHECKING

from bulktx.exceptions import UnknownTypeError, WorkloadError
from bulktx.txmodel.types import TxnSignature

if TYPE_CHECKING:
    from collections.abc import Collection, Iterator

    from bulktx.txmodel.registry import TypeRegistry
    from bulktx.txmodel.types import Params


class TxnPool:
    """
    Signatures in id order.

    One producer may submit while one consumer takes bulks; a single lock
    serializes both sides.
    """

    def __init__(self, registry: TypeRegistry, next_id: int = 0) -> None:
        self.registry = registry
        self._queue: deque[TxnSignature] = deque()
        self._next_id = next_id
        self._lock = threading.Lock()

    @property
    def next_id(self) -> int:
        return self._next_id

    def __len__(self) -> int:
        return len(self._queue)

    def __iter__(self) -> Iterator[TxnSignature]:
        with self._lock:
            return iter(list(self._queue))

    def submit(self, type_id: int, params: Params = (), submitted_at: float = 0.0) -> TxnSignature:
        """
        Append a signature with the next id.

        Raises
        ------
        UnknownTypeError
            If ``type_id`` is not registered.
        """
        if type_id not in self.registry:
            raise UnknownTypeError(type_id)
        with self._lock:
            sig = TxnSignature(self._next_id, type_id, tuple(params), submitted_at)
            self._queue.append(sig)
            self._next_id += 1
        return sig

    def add(self, sig: TxnSignature) -> TxnSignature:
        """Append a signature carrying its own id (workload replay)."""
        if sig.type_id not in self.registry:
            raise UnknownTypeError(sig.type_id)
        with self._lock:
            if sig.id < self._next_id:
                raise WorkloadError(
                    f"transaction id {sig.id} is not greater than previous id {self._next_id - 1}"
                )
            self._queue.append(sig)
            self._next_id = sig.id + 1
        return sig

    def peek(self, n: int | None = None) -> list[TxnSignature]:
        with self._lock:
            items = list(self._queue)
        return items if n is None else items[:n]

    def take(self, n: int | None = None) -> list[TxnSignature]:
        """Remove and return the first ``n`` signatures (all if ``None``)."""
        with self._lock:
            count = len(self._queue) if n is None else min(n, len(self._queue))
            return [self._queue.popleft() for _ in range(count)]

    def take_ids(self, ids: Collection[int]) -> list[TxnSignature]:
        """Remove and return the signatures whose id is in ``ids``, in id order."""
        wanted = set(ids)
        with self._lock:
            taken = [s for s in self._queue if s.id in wanted]
            if taken:
                self._queue = deque(s for s in self._queue if s.id not in wanted)
        return taken
