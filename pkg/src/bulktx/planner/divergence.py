"""Branch-divergence metric of a lane assignment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bulktx.txmodel.types import TxnSignature


@dataclass(frozen=True)
class DivergenceMetric:
    """
    Distinct transaction types per warp-sized chunk of a bulk.

    A chunk with ``k`` distinct types runs ``k`` branch paths one after the
    other; the metric counts the ``k - 1`` extra paths over all chunks.
    """

    warp_size: int
    per_chunk: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(k - 1 for k in self.per_chunk if k)

    @property
    def divergent_chunks(self) -> int:
        return sum(1 for k in self.per_chunk if k > 1)

    @property
    def is_homogeneous(self) -> bool:
        return self.total == 0


def divergence_of(type_ids: Sequence[int] | np.ndarray, warp_size: int = 32) -> DivergenceMetric:
    """Metric of the lane assignment ``type_ids`` (lane ``i`` runs ``type_ids[i]``)."""
    if warp_size < 1:
        raise ValueError("warp_size must be positive")
    ids = np.asarray(type_ids, dtype=np.int64)
    per_chunk = tuple(
        int(len(np.unique(ids[lo : lo + warp_size]))) for lo in range(0, len(ids), warp_size)
    )
    return DivergenceMetric(warp_size, per_chunk)


def bulk_divergence(bulk: Sequence[TxnSignature], warp_size: int = 32) -> DivergenceMetric:
    return divergence_of([s.type_id for s in bulk], warp_size)
