"""
TM1-like workload.

Seven simplified telecom procedures over subscriber-keyed rows. Row ids
are derived from the subscriber id, which is the partition key, so every
access of an instance belongs to one subscriber:

- ``access_info``: ``s_id * 4 + ai_type``
- ``special_facility``: ``s_id * 4 + sf_type``
- ``call_forwarding``: ``sf_id * 3 + start_slot``

The procedures that locate their subscriber by number first are submitted
as two transactions, a subscriber read followed by the update. Every
instance carries a trailing ``fail`` flag that forces an abort.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

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

GET_SUBSCRIBER_DATA = 0
GET_NEW_DESTINATION = 1
GET_ACCESS_DATA = 2
UPDATE_SUBSCRIBER_DATA = 3
UPDATE_LOCATION = 4
INSERT_CALL_FORWARDING = 5
DELETE_CALL_FORWARDING = 6

# standard mix, in percent
MIX = {
    GET_SUBSCRIBER_DATA: 35,
    GET_NEW_DESTINATION: 10,
    GET_ACCESS_DATA: 35,
    UPDATE_SUBSCRIBER_DATA: 2,
    UPDATE_LOCATION: 14,
    INSERT_CALL_FORWARDING: 2,
    DELETE_CALL_FORWARDING: 2,
}
SPLIT_LOOKUP = frozenset({UPDATE_LOCATION, INSERT_CALL_FORWARDING, DELETE_CALL_FORWARDING})

TYPES_PER_SUBSCRIBER = 4
SLOTS_PER_FACILITY = 3
SLOT_HOURS = 8
ACTIVE_PROBABILITY = 0.85


def ai_id(s_id: int, ai_type: int) -> int:
    return s_id * TYPES_PER_SUBSCRIBER + ai_type


def sf_id(s_id: int, sf_type: int) -> int:
    return s_id * TYPES_PER_SUBSCRIBER + sf_type


def cf_id(s_id: int, sf_type: int, slot: int) -> int:
    return sf_id(s_id, sf_type) * SLOTS_PER_FACILITY + slot


def subscriber_count(spec: WorkloadSpec) -> int:
    return spec.tuple_count * spec.scale_factor


def _fixed(*names: str) -> tuple[ColumnDef, ...]:
    return tuple(ColumnDef(name=n) for n in names)


def schemas(spec: WorkloadSpec) -> list[TableSchema]:
    return [
        TableSchema(
            name="subscriber",
            columns=(
                *_fixed("s_id", "bit_1", "vlr_location"),
                ColumnDef(name="sub_nbr", kind="var"),
            ),
            primary_key="s_id",
            partition_key="s_id",
        ),
        TableSchema(
            name="access_info",
            columns=(*_fixed("ai_id", "s_id", "ai_type"), ColumnDef(name="data", kind="var")),
            primary_key="ai_id",
            partition_key="s_id",
        ),
        TableSchema(
            name="special_facility",
            columns=_fixed("sf_id", "s_id", "sf_type", "is_active", "data_a"),
            primary_key="sf_id",
            partition_key="s_id",
        ),
        TableSchema(
            name="call_forwarding",
            columns=(
                *_fixed("cf_id", "s_id", "start_time", "end_time"),
                ColumnDef(name="numberx", kind="var"),
            ),
            primary_key="cf_id",
            partition_key="s_id",
        ),
    ]


def _some_types(rng: np.random.Generator) -> list[int]:
    count = int(rng.integers(1, TYPES_PER_SUBSCRIBER + 1))
    return sorted(rng.choice(TYPES_PER_SUBSCRIBER, size=count, replace=False).tolist())


def populate(store: ColumnStore, spec: WorkloadSpec) -> None:
    """Each subscriber gets one to four access-info and special-facility rows."""
    rng = np.random.default_rng(spec.seed + 1)
    for s in range(subscriber_count(spec)):
        store.append_row("subscriber", (s, s % 2, 0, f"{s:015d}".encode()))
        for ai_type in _some_types(rng):
            store.append_row("access_info", (ai_id(s, ai_type), s, ai_type, b"AAA"))
        for sf_type in _some_types(rng):
            active = int(rng.random() < ACTIVE_PROBABILITY)
            store.append_row(
                "special_facility", (sf_id(s, sf_type), s, sf_type, active, int(rng.integers(256)))
            )
            for slot in range(int(rng.integers(0, SLOTS_PER_FACILITY + 1))):
                start = slot * SLOT_HOURS
                store.append_row(
                    "call_forwarding",
                    (cf_id(s, sf_type, slot), s, start, start + SLOT_HOURS, f"{s:015d}".encode()),
                )


def _fail_if(acc: StoreAccessor, fail: object) -> None:
    if fail:
        acc.abort("injected abort")


def _get_subscriber_data(acc: StoreAccessor, params: Params) -> None:
    s_id, fail = int(params[0]), params[-1]
    for column in ("bit_1", "vlr_location", "sub_nbr"):
        acc.read("subscriber", column, s_id)
    _fail_if(acc, fail)


def _declare_get_subscriber_data(fp: Footprint, params: Params) -> None:
    for column in ("bit_1", "vlr_location", "sub_nbr"):
        fp.read("subscriber", column, params[0])


def _get_new_destination(acc: StoreAccessor, params: Params) -> None:
    s_id, sf_type, slot, fail = (int(p) for p in params)
    sf, cf = sf_id(s_id, sf_type), cf_id(s_id, sf_type, slot)
    if not acc.lookup("special_facility", sf):
        acc.abort("no special facility")
    if not acc.read("special_facility", "is_active", sf):
        acc.abort("special facility inactive")
    if not acc.lookup("call_forwarding", cf):
        acc.abort("no call forwarding")
    acc.read("call_forwarding", "end_time", cf)
    acc.read("call_forwarding", "numberx", cf)
    _fail_if(acc, fail)


def _declare_get_new_destination(fp: Footprint, params: Params) -> None:
    s_id, sf_type, slot = (int(p) for p in params[:3])
    sf, cf = sf_id(s_id, sf_type), cf_id(s_id, sf_type, slot)
    fp.lookup("special_facility", sf).read("special_facility", "is_active", sf)
    fp.lookup("call_forwarding", cf)
    fp.read("call_forwarding", "end_time", cf).read("call_forwarding", "numberx", cf)


def _get_access_data(acc: StoreAccessor, params: Params) -> None:
    s_id, ai_type, fail = (int(p) for p in params)
    ai = ai_id(s_id, ai_type)
    if not acc.lookup("access_info", ai):
        acc.abort("no access info")
    acc.read("access_info", "data", ai)
    _fail_if(acc, fail)


def _declare_get_access_data(fp: Footprint, params: Params) -> None:
    ai = ai_id(int(params[0]), int(params[1]))
    fp.lookup("access_info", ai).read("access_info", "data", ai)


def _update_subscriber_data(acc: StoreAccessor, params: Params) -> None:
    s_id, sf_type, bit, data_a, fail = (int(p) for p in params)
    sf = sf_id(s_id, sf_type)
    acc.write("subscriber", "bit_1", s_id, bit)
    # late abort points: both follow the first write
    _fail_if(acc, fail)
    if not acc.lookup("special_facility", sf):
        acc.abort("no special facility")
    acc.write("special_facility", "data_a", sf, data_a)


def _declare_update_subscriber_data(fp: Footprint, params: Params) -> None:
    s_id, sf_type = int(params[0]), int(params[1])
    sf = sf_id(s_id, sf_type)
    fp.write("subscriber", "bit_1", s_id)
    fp.lookup("special_facility", sf).write("special_facility", "data_a", sf)


def _update_location(acc: StoreAccessor, params: Params) -> None:
    s_id, location, fail = (int(p) for p in params)
    _fail_if(acc, fail)
    acc.write("subscriber", "vlr_location", s_id, location)


def _declare_update_location(fp: Footprint, params: Params) -> None:
    fp.write("subscriber", "vlr_location", params[0])


def _insert_call_forwarding(acc: StoreAccessor, params: Params) -> None:
    s_id, sf_type, slot, fail = (int(p) for p in params)
    if not acc.lookup("special_facility", sf_id(s_id, sf_type)):
        acc.abort("no special facility")
    _fail_if(acc, fail)
    start = slot * SLOT_HOURS
    row = (cf_id(s_id, sf_type, slot), s_id, start, start + SLOT_HOURS, f"{s_id:015d}".encode())
    acc.insert("call_forwarding", row)


def _declare_insert_call_forwarding(fp: Footprint, params: Params) -> None:
    s_id, sf_type, slot = (int(p) for p in params[:3])
    fp.lookup("special_facility", sf_id(s_id, sf_type))
    fp.insert("call_forwarding", cf_id(s_id, sf_type, slot))


def _delete_call_forwarding(acc: StoreAccessor, params: Params) -> None:
    s_id, sf_type, slot, fail = (int(p) for p in params)
    _fail_if(acc, fail)
    acc.delete("call_forwarding", cf_id(s_id, sf_type, slot))


def _declare_delete_call_forwarding(fp: Footprint, params: Params) -> None:
    s_id, sf_type, slot = (int(p) for p in params[:3])
    fp.delete("call_forwarding", cf_id(s_id, sf_type, slot))


def _root(fp: Footprint, params: Params) -> None:
    fp.lookup("subscriber", params[0])


_PROCEDURES: dict[int, tuple[str, Callable[..., None], Callable[..., None], bool]] = {
    GET_SUBSCRIBER_DATA: (
        "get_subscriber_data", _get_subscriber_data, _declare_get_subscriber_data, True
    ),
    GET_NEW_DESTINATION: (
        "get_new_destination", _get_new_destination, _declare_get_new_destination, True
    ),
    GET_ACCESS_DATA: ("get_access_data", _get_access_data, _declare_get_access_data, True),
    UPDATE_SUBSCRIBER_DATA: (
        "update_subscriber_data", _update_subscriber_data, _declare_update_subscriber_data, False
    ),
    UPDATE_LOCATION: ("update_location", _update_location, _declare_update_location, True),
    INSERT_CALL_FORWARDING: (
        "insert_call_forwarding", _insert_call_forwarding, _declare_insert_call_forwarding, True
    ),
    DELETE_CALL_FORWARDING: (
        "delete_call_forwarding", _delete_call_forwarding, _declare_delete_call_forwarding, True
    ),
}


def register(registry: TypeRegistry, spec: WorkloadSpec) -> None:
    for type_id, (name, procedure, declare, two_phase) in _PROCEDURES.items():
        registry.register_type(
            TxnType(
                type_id=type_id,
                name=name,
                procedure=procedure,
                declared_ops=declare,
                is_two_phase=two_phase,
                partition_keys=lambda p: (int(p[0]),),
                root_locks=_root,
            )
        )


def _params(type_id: int, s_id: int, rng: np.random.Generator, fail: int) -> tuple[int, ...]:
    sf_type = int(rng.integers(TYPES_PER_SUBSCRIBER))
    slot = int(rng.integers(SLOTS_PER_FACILITY))
    if type_id == GET_SUBSCRIBER_DATA:
        return (s_id, fail)
    if type_id == GET_ACCESS_DATA:
        return (s_id, sf_type, fail)
    if type_id == UPDATE_SUBSCRIBER_DATA:
        return (s_id, sf_type, int(rng.integers(2)), int(rng.integers(256)), fail)
    if type_id == UPDATE_LOCATION:
        return (s_id, int(rng.integers(1 << 31)), fail)
    return (s_id, sf_type, slot, fail)


def generate(spec: WorkloadSpec) -> list[TxnSignature]:
    """
    ``txn_count`` submissions drawn from the standard mix.

    A split procedure contributes its subscriber read and itself; the last
    pair is cut when it would exceed ``txn_count``. Subscribers are drawn
    with the same ``alpha`` skew as the micro-benchmark.
    """
    rng = np.random.default_rng(spec.seed)
    type_ids = np.fromiter(MIX, dtype=np.int64)
    weights = np.fromiter(MIX.values(), dtype=np.float64)
    weights /= weights.sum()
    subscribers = subscriber_count(spec)
    out: list[TxnSignature] = []
    while len(out) < spec.txn_count:
        type_id = int(rng.choice(type_ids, p=weights))
        s_id = 0 if rng.random() < spec.alpha else int(rng.integers(subscribers))
        fail = int(rng.random() < spec.abort_rate)
        if type_id in SPLIT_LOOKUP:
            out.append(TxnSignature(len(out), GET_SUBSCRIBER_DATA, (s_id, 0)))
            if len(out) == spec.txn_count:
                break
        out.append(TxnSignature(len(out), type_id, _params(type_id, s_id, rng, fail)))
    return out
