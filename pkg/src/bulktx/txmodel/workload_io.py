"""
Workload file reader and writer.

One transaction per line, comma-separated::

    #spec {"kind": "micro", "seed": 7, ...}
    0,3,17,1
    ,3,42,0

Fields are the transaction id (may be empty, then the previous id plus one
is used), the type id, and the parameter values. A parameter that parses as
a decimal integer is an integer, anything else is a string. Lines starting
with ``#`` are comments, except the optional ``#spec`` header which carries
the generating specification as JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from bulktx.exceptions import WorkloadError
from bulktx.txmodel.types import TxnSignature

if TYPE_CHECKING:
    import os
    from collections.abc import Iterable

    from bulktx.txmodel.types import Params, ParamValue

SPEC_PREFIX = "#spec "


@dataclass(frozen=True)
class WorkloadEntry:
    id: int | None
    type_id: int
    params: Params = ()


@dataclass
class Workload:
    """Parsed workload file."""

    entries: list[WorkloadEntry] = field(default_factory=list)
    header: dict[str, Any] | None = None

    def signatures(self, start_id: int = 0) -> list[TxnSignature]:
        """
        Signatures with ids assigned.

        Raises
        ------
        WorkloadError
            If explicit ids are not strictly increasing.
        """
        out: list[TxnSignature] = []
        next_id = start_id
        for entry in self.entries:
            tid = next_id if entry.id is None else entry.id
            if tid < next_id:
                raise WorkloadError(f"transaction id {tid} is not increasing")
            out.append(TxnSignature(tid, entry.type_id, entry.params))
            next_id = tid + 1
        return out


def _parse_token(token: str) -> ParamValue:
    try:
        return int(token)
    except ValueError:
        return token


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise WorkloadError(f"line {lineno}: bad {what} '{token}'") from None


def parse_workload(text: str) -> Workload:
    """Parse workload text."""
    workload = Workload()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(SPEC_PREFIX):
            try:
                workload.header = json.loads(line[len(SPEC_PREFIX) :])
            except json.JSONDecodeError as e:
                raise WorkloadError(f"line {lineno}: bad spec header: {e}") from e
            continue
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) < 2:
            raise WorkloadError(f"line {lineno}: expected 'id,type_id[,params...]'")
        tid = _parse_int(fields[0], "transaction id", lineno) if fields[0] else None
        type_id = _parse_int(fields[1], "type id", lineno)
        params = tuple(_parse_token(f) for f in fields[2:])
        workload.entries.append(WorkloadEntry(tid, type_id, params))
    return workload


def read_workload(path: str | os.PathLike[str]) -> Workload:
    with open(path) as f:
        return parse_workload(f.read())


def _format_param(value: ParamValue) -> str:
    text = str(value)
    if "," in text or "\n" in text:
        raise WorkloadError(f"parameter {value!r} cannot be written to a workload file")
    if isinstance(value, str) and _parse_token(text) != value:
        raise WorkloadError(f"string parameter {value!r} would read back as an integer")
    return text


def format_workload(txns: Iterable[TxnSignature], header: dict[str, Any] | None = None) -> str:
    """Render signatures (with their ids) as workload text."""
    lines = []
    if header is not None:
        lines.append(SPEC_PREFIX + json.dumps(header, sort_keys=True))
    for sig in txns:
        fields = [str(sig.id), str(sig.type_id), *(_format_param(p) for p in sig.params)]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_workload(
    path: str | os.PathLike[str],
    txns: Iterable[TxnSignature],
    header: dict[str, Any] | None = None,
) -> None:
    with open(path, "w") as f:
        f.write(format_workload(txns, header))
