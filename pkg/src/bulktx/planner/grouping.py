"""
Type grouping.

Lanes of one lock-step group that run different transaction types serialize
their branches. Grouping reorders a bulk by type id with most-significant-
digit radix passes of ``b`` bits each, so that neighbouring lanes receive the
same type. Each pass splits every bucket by the next digit with a stable
sort on the leading digits (numpy radix-sorts small integer keys), so each
type keeps its input order.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, TypeVar

import numpy as np
from pydantic import BaseModel, Field

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bulktx.txmodel.types import TxnSignature

S = TypeVar("S", bound="TxnSignature")


def full_passes(type_count: int, bits_per_pass: int) -> int:
    """Passes that separate ``type_count`` types completely: ``ceil(log2 T / b)``."""
    if type_count <= 1:
        return 0
    return math.ceil(math.log2(type_count) / bits_per_pass)


class GroupingConfig(BaseModel):
    """
    Radix-grouping settings.

    Attributes
    ----------
    bits_per_pass : int
        Digit width ``b`` of one pass.
    passes : int | None
        Number of passes; 0 disables grouping, ``None`` means enough passes to
        separate every type.
    type_count : int
        Number of registered types ``T``; type ids lie in ``0..T-1``.
    """

    bits_per_pass: int = Field(default=2, ge=1, le=16)
    passes: int | None = Field(default=None, ge=0)
    type_count: int = Field(default=8, ge=1)

    model_config = {"frozen": True}

    @property
    def key_bits(self) -> int:
        """Width of the type-id key covered by full passes."""
        return max(1, math.ceil(math.log2(self.type_count)))

    @property
    def effective_passes(self) -> int:
        full = full_passes(self.type_count, self.bits_per_pass)
        return full if self.passes is None else min(self.passes, full)


def group_order(type_ids: np.ndarray, config: GroupingConfig) -> np.ndarray:
    """
    Permutation that groups ``type_ids``.

    Returns
    -------
    np.ndarray
        Indices into ``type_ids``; applying them yields the grouped order.
    """
    order = np.arange(len(type_ids), dtype=np.int64)
    passes = config.effective_passes
    if passes == 0 or len(type_ids) < 2:
        return order
    keys = np.asarray(type_ids, dtype=np.int64)
    width = config.key_bits
    for p in range(1, passes + 1):
        # keys are already ordered by their top (p-1)*b bits; split by the next digit
        bucket = keys[order] >> max(width - p * config.bits_per_pass, 0)
        if bucket.max(initial=0) < 1 << 16:
            bucket = bucket.astype(np.uint16)
        order = order[np.argsort(bucket, kind="stable")]
    return order


def group_by_type(bulk: Sequence[S], config: GroupingConfig) -> list[S]:
    """
    Reorder ``bulk`` by type id with ``config.passes`` radix passes.

    With ``p`` passes the bulk falls into at most ``2**(p*b)`` buckets; with
    :func:`full_passes` every bucket holds one type. Within a bucket the
    input order is kept.
    """
    type_ids = np.fromiter((s.type_id for s in bulk), dtype=np.int64, count=len(bulk))
    return [bulk[i] for i in group_order(type_ids, config).tolist()]
