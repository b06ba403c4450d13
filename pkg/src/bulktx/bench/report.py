"""
Benchmark reports.

CSV schema version 1, one row per bulk and a ``summary`` row::

    schema_version,row,strategy,bulk_size,committed,aborted,rolled_back,
    generation_s,execution_s,total_s,divergence,throughput_ktps,avg_response_s

``total_s`` is ``generation_s + execution_s``; throughput counts committed
transactions only. A run without bulks has no rows, only the header.
"""

from __future__ import annotations

import csv
import io
from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, Field, computed_field

if TYPE_CHECKING:
    import os

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "schema_version",
    "row",
    "strategy",
    "bulk_size",
    "committed",
    "aborted",
    "rolled_back",
    "generation_s",
    "execution_s",
    "total_s",
    "divergence",
    "throughput_ktps",
    "avg_response_s",
)

ReportFormat = Literal["csv", "text"]


def _ktps(committed: int, seconds: float) -> float:
    return committed / seconds / 1000.0 if seconds > 0 else 0.0


class BulkRecord(BaseModel):
    """Metrics of one executed bulk."""

    index: int = Field(ge=0)
    strategy: str
    bulk_size: int = Field(ge=0)
    committed: int = Field(default=0, ge=0)
    aborted: int = Field(default=0, ge=0)
    rolled_back: int = Field(default=0, ge=0)
    generation_s: float = Field(default=0.0, ge=0)
    execution_s: float = Field(default=0.0, ge=0)
    divergence: int = Field(default=0, ge=0)
    rounds: int = Field(default=1, ge=0)
    avg_response_s: float = Field(default=0.0, ge=0)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_s(self) -> float:
        return self.generation_s + self.execution_s

    @computed_field  # type: ignore[prop-decorator]
    @property
    def throughput_ktps(self) -> float:
        return _ktps(self.committed, self.total_s)


class ExecReport(BaseModel):
    """
    Result of one benchmark run.

    Attributes
    ----------
    strategy : str
        Requested strategy, or ``auto``.
    bulks : list[BulkRecord]
        Per-bulk metrics in execution order.
    verified : bool | None
        Whether the final state matched the sequential oracle; ``None`` when
        the check was skipped (relaxed strategies, or disabled).
    error : str | None
        Failure that stopped the run; the metrics cover the bulks before it.
    """

    strategy: str
    bulks: list[BulkRecord] = Field(default_factory=list)
    verified: bool | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.verified is not False

    @computed_field  # type: ignore[prop-decorator]
    @property
    def txns(self) -> int:
        return sum(b.bulk_size for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def committed(self) -> int:
        return sum(b.committed for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def aborted(self) -> int:
        return sum(b.aborted for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def rolled_back(self) -> int:
        return sum(b.rolled_back for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def generation_s(self) -> float:
        return sum(b.generation_s for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def execution_s(self) -> float:
        return sum(b.execution_s for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total_s(self) -> float:
        return self.generation_s + self.execution_s

    @computed_field  # type: ignore[prop-decorator]
    @property
    def divergence(self) -> int:
        return sum(b.divergence for b in self.bulks)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def throughput_ktps(self) -> float:
        return _ktps(self.committed, self.total_s)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def avg_response_s(self) -> float:
        if not self.txns:
            return 0.0
        return sum(b.avg_response_s * b.bulk_size for b in self.bulks) / self.txns

    @property
    def bulk_sizes(self) -> list[int]:
        return [b.bulk_size for b in self.bulks]


def _row(row: str, record: BulkRecord | ExecReport, strategy: str, size: int) -> list[str]:
    return [
        str(CSV_SCHEMA_VERSION),
        row,
        strategy,
        str(size),
        str(record.committed),
        str(record.aborted),
        str(record.rolled_back),
        f"{record.generation_s:.6f}",
        f"{record.execution_s:.6f}",
        f"{record.total_s:.6f}",
        str(record.divergence),
        f"{record.throughput_ktps:.3f}",
        f"{record.avg_response_s:.6f}",
    ]


def format_csv(report: ExecReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for b in report.bulks:
        writer.writerow(_row(str(b.index), b, b.strategy, b.bulk_size))
    if report.bulks:
        writer.writerow(_row("summary", report, report.strategy, report.txns))
    return buf.getvalue()


def format_text(report: ExecReport) -> str:
    lines = [
        f"Strategy: {report.strategy}",
        f"Bulks: {len(report.bulks)} (sizes {min(report.bulk_sizes, default=0)}"
        f"..{max(report.bulk_sizes, default=0)})",
        f"Transactions: {report.txns} committed={report.committed} "
        f"aborted={report.aborted} rolled_back={report.rolled_back}",
        f"Time: generation {report.generation_s:.6f}s + execution {report.execution_s:.6f}s"
        f" = {report.total_s:.6f}s",
        f"Throughput: {report.throughput_ktps:.3f} ktps",
        f"Average response: {report.avg_response_s:.6f}s",
        f"Divergence: {report.divergence}",
    ]
    used = sorted({b.strategy for b in report.bulks})
    if report.strategy == "auto" and used:
        lines.append(f"Chosen strategies: {', '.join(used)}")
    if report.verified is None:
        lines.append("Oracle check: skipped")
    else:
        lines.append(f"Oracle check: {'passed' if report.verified else 'FAILED'}")
    if report.error:
        lines.append(f"Error: {report.error}")
    return "\n".join(lines) + "\n"


def emit_report(report: ExecReport, fmt: ReportFormat = "csv") -> str:
    """
    Render ``report`` as CSV or as a human-readable summary.

    Examples
    --------
    >>> emit_report(ExecReport(strategy="tpl")).splitlines()[0].split(",")[:3]
    ['schema_version', 'row', 'strategy']
    """
    if fmt == "csv":
        return format_csv(report)
    if fmt == "text":
        return format_text(report)
    raise ValueError(f"unknown report format '{fmt}'")


def write_report(
    report: ExecReport, path: str | os.PathLike[str], fmt: ReportFormat = "csv"
) -> None:
    with open(path, "w") as f:
        f.write(emit_report(report, fmt))
