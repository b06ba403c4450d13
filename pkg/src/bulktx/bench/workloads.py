"""
Workload specifications and generators.

A :class:`WorkloadSpec` fully determines a workload: the schema and initial
rows, the registered transaction types and the submitted signatures. The
spec travels in the ``#spec`` header of a generated workload file, so a
run can rebuild everything but the signatures from the file alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

import structlog
from pydantic import BaseModel, Field, ValidationError

from bulktx.bench import micro, mixed, tm1, tpcb
from bulktx.exceptions import WorkloadError
from bulktx.storage.column_store import ColumnStore
from bulktx.txmodel.registry import TypeRegistry
from bulktx.txmodel.workload_io import format_workload, read_workload

if TYPE_CHECKING:
    import os
    from types import ModuleType

    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()

WorkloadKind = Literal["micro", "tpcb_like", "tm1_like", "mixed"]

_KINDS: dict[str, ModuleType] = {
    "micro": micro,
    "tpcb_like": tpcb,
    "tm1_like": tm1,
    "mixed": mixed,
}


class WorkloadSpec(BaseModel):
    """
    Parameters of a generated workload.

    Attributes
    ----------
    kind : {"micro", "tpcb_like", "tm1_like", "mixed"}
        Workload family.
    type_count : int
        Number of transaction types ``T`` (micro only; the other kinds have
        fixed type sets).
    weight : int
        Computation weight ``x``; a micro transaction runs the compute
        kernel ``100 * x`` rounds.
    alpha : float
        Skew: probability that a transaction picks the first tuple (branch,
        subscriber); the remainder is uniform.
    tuple_count : int
        Tuples of the micro and mixed tables; accounts per branch and
        subscribers per scale unit for the public analogues.
    txn_count : int
        Number of submitted transactions.
    scale_factor : int
        ``f``: branches (tpcb_like) or subscriber scale (tm1_like).
    seed : int
        Seed of the generator; equal specs give identical workloads.
    abort_rate : float
        Probability of an injected abort (tm1_like and mixed).
    """

    kind: WorkloadKind = "micro"
    type_count: int = Field(default=8, ge=1, le=1 << 16)
    weight: int = Field(default=16, ge=0)
    alpha: float = Field(default=0.0, ge=0.0, le=1.0)
    tuple_count: int = Field(default=1024, ge=0)
    txn_count: int = Field(default=4096, ge=0)
    scale_factor: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    abort_rate: float = Field(default=0.0, ge=0.0, le=1.0)

    model_config = {"extra": "forbid", "frozen": True}


@dataclass
class Workbench:
    """A loaded store and a frozen registry built from one spec."""

    spec: WorkloadSpec
    store: ColumnStore
    registry: TypeRegistry


def _kind(spec: WorkloadSpec) -> ModuleType:
    if spec.tuple_count == 0:
        raise WorkloadError(f"{spec.kind} workload needs at least one tuple")
    return _KINDS[spec.kind]


def build_workbench(spec: WorkloadSpec) -> Workbench:
    """
    Create the schema, load the initial rows and register the types of ``spec``.

    Raises
    ------
    WorkloadError
        If ``spec.tuple_count`` is 0.
    """
    kind = _kind(spec)
    store = ColumnStore(kind.schemas(spec))
    kind.populate(store, spec)
    registry = TypeRegistry()
    kind.register(registry, spec)
    registry.freeze()
    log.debug(
        "workbench built",
        kind=spec.kind,
        rows={t.name: int(t.live_mask().sum()) for t in store.tables},
        types=len(registry),
    )
    return Workbench(spec, store, registry)


def gen_micro(spec: WorkloadSpec) -> list[TxnSignature]:
    """Read-compute-write transactions, types uniform, tuples skewed by alpha."""
    return micro.generate(_checked(spec, "micro"))


def gen_tpcb_like(spec: WorkloadSpec) -> list[TxnSignature]:
    """Branch-partitioned deposits over ``f`` branches."""
    return tpcb.generate(_checked(spec, "tpcb_like"))


def gen_tm1_like(spec: WorkloadSpec) -> list[TxnSignature]:
    """The seven subscriber procedures in the standard mix."""
    return tm1.generate(_checked(spec, "tm1_like"))


def gen_mixed(spec: WorkloadSpec) -> list[TxnSignature]:
    """Random read/write sets with two-phase and late aborts."""
    return mixed.generate(_checked(spec, "mixed"))


def _checked(spec: WorkloadSpec, kind: str) -> WorkloadSpec:
    if spec.kind != kind:
        raise WorkloadError(f"spec of kind '{spec.kind}' given to the {kind} generator")
    _kind(spec)
    return spec


def generate_workload(spec: WorkloadSpec) -> list[TxnSignature]:
    """
    Generate the signatures of ``spec``.

    Raises
    ------
    WorkloadError
        If ``spec.tuple_count`` is 0.
    """
    txns: list[TxnSignature] = _kind(spec).generate(spec)
    log.info("workload generated", kind=spec.kind, txns=len(txns), seed=spec.seed)
    return txns


def format_generated(spec: WorkloadSpec) -> str:
    """Workload file text with the spec header; byte-identical for equal specs."""
    return format_workload(generate_workload(spec), header=spec.model_dump(mode="json"))


def write_generated(spec: WorkloadSpec, path: str | os.PathLike[str]) -> int:
    """Write the workload file of ``spec``; returns the number of transactions."""
    text = format_generated(spec)
    with open(path, "w") as f:
        f.write(text)
    return text.count("\n") - 1


def spec_from_header(header: dict[str, Any] | None) -> WorkloadSpec:
    """
    Rebuild the spec of a workload file header.

    Raises
    ------
    WorkloadError
        If there is no header or it is not a valid spec.
    """
    if header is None:
        raise WorkloadError("workload file has no '#spec' header")
    try:
        return WorkloadSpec.model_validate(header)
    except ValidationError as e:
        raise WorkloadError(f"invalid workload spec: {e}") from e


def load_workload(path: str | os.PathLike[str]) -> tuple[Workbench, list[TxnSignature]]:
    """Read a generated workload file and rebuild its testbed."""
    workload = read_workload(path)
    bench = build_workbench(spec_from_header(workload.header))
    return bench, workload.signatures()
