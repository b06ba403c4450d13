"""Tests for benchmark reports."""

from __future__ import annotations

import csv
import io
from typing import TYPE_CHECKING

import pytest

from bulktx.bench import CSV_COLUMNS, BulkRecord, ExecReport, emit_report, write_report

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture
def report() -> ExecReport:
    """Fixture providing a two-bulk auto report."""
    return ExecReport(
        strategy="auto",
        bulks=[
            BulkRecord(
                index=0,
                strategy="kset",
                bulk_size=4,
                committed=3,
                aborted=1,
                generation_s=0.001,
                execution_s=0.002,
                divergence=2,
                avg_response_s=0.5,
            ),
            BulkRecord(
                index=1,
                strategy="tpl",
                bulk_size=2,
                committed=1,
                rolled_back=1,
                generation_s=0.0,
                execution_s=0.001,
                avg_response_s=2.0,
            ),
        ],
        verified=True,
    )


class TestExecReport:
    """Tests for report aggregates."""

    def test_totals(self, report: ExecReport) -> None:
        """Run totals sum the bulks."""
        assert report.txns == 6
        assert report.committed == 4
        assert (report.aborted, report.rolled_back) == (1, 1)
        assert report.total_s == pytest.approx(0.004)
        assert report.throughput_ktps == pytest.approx(1.0)
        assert report.bulk_sizes == [4, 2]

    def test_response_is_weighted_by_bulk_size(self, report: ExecReport) -> None:
        """The average response weighs each bulk by its size."""
        assert report.avg_response_s == pytest.approx((0.5 * 4 + 2.0 * 2) / 6)

    def test_bulk_throughput(self) -> None:
        """Throughput counts committed transactions only."""
        record = BulkRecord(
            index=0, strategy="tpl", bulk_size=5, committed=2, aborted=3, execution_s=0.001
        )
        assert record.throughput_ktps == pytest.approx(2.0)

    def test_zero_time(self) -> None:
        """A bulk without measured time has zero throughput."""
        assert BulkRecord(index=0, strategy="tpl", bulk_size=1, committed=1).throughput_ktps == 0

    def test_ok(self, report: ExecReport) -> None:
        """Failed checks and errors make a run not ok."""
        assert report.ok
        assert ExecReport(strategy="tpl").ok
        assert not ExecReport(strategy="tpl", verified=False).ok
        assert not ExecReport(strategy="tpl", error="watchdog").ok


class TestEmitReport:
    """Tests for CSV and text rendering."""

    def test_empty_csv_is_header_only(self) -> None:
        """A run without bulks has only the header."""
        text = emit_report(ExecReport(strategy="tpl"))
        assert text.splitlines() == [",".join(CSV_COLUMNS)]

    def test_csv_rows(self, report: ExecReport) -> None:
        """One row per bulk and a summary row."""
        rows = list(csv.DictReader(io.StringIO(emit_report(report, "csv"))))
        assert [r["row"] for r in rows] == ["0", "1", "summary"]
        assert {r["schema_version"] for r in rows} == {"1"}
        summary = rows[-1]
        assert summary["strategy"] == "auto"
        assert summary["bulk_size"] == "6"
        assert summary["committed"] == "4"
        assert summary["total_s"] == "0.004000"
        assert summary["throughput_ktps"] == "1.000"
        assert rows[0]["divergence"] == "2"

    def test_text(self, report: ExecReport) -> None:
        """The text summary names chosen strategies and the oracle result."""
        text = emit_report(report, "text")
        assert "Strategy: auto" in text
        assert "Bulks: 2 (sizes 2..4)" in text
        assert "Chosen strategies: kset, tpl" in text
        assert "Oracle check: passed" in text

    def test_text_skipped_and_failed(self) -> None:
        """Skipped and failed checks are spelled out."""
        assert "Oracle check: skipped" in emit_report(ExecReport(strategy="tpl"), "text")
        failed = ExecReport(strategy="tpl", verified=False, error="boom")
        text = emit_report(failed, "text")
        assert "Oracle check: FAILED" in text
        assert "Error: boom" in text

    def test_unknown_format(self, report: ExecReport) -> None:
        """Unknown formats are rejected."""
        with pytest.raises(ValueError, match="unknown report format"):
            emit_report(report, "json")  # type: ignore[arg-type]

    def test_write_report(self, report: ExecReport, tmp_path: Path) -> None:
        """Reports can be written to a file."""
        path = tmp_path / "report.txt"
        write_report(report, path, "text")
        assert path.read_text() == emit_report(report, "text")
