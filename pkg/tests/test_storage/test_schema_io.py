"""Tests for the schema/load file format."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from bulktx.exceptions import SchemaError
from bulktx.storage import compare_snapshots, dump_store, format_store, load_store, parse_store
from bulktx.storage import snapshot as take_snapshot

if TYPE_CHECKING:
    import pathlib


class TestParseStore:
    """Tests for reading schema/load text."""

    def test_load_bank_store(self, bank_store_path: pathlib.Path) -> None:
        """The bank fixture file has eight accounts."""
        store = load_store(bank_store_path)
        table = store.table("account")
        assert table.row_count == 8
        assert table.schema.partition_key == "id"
        assert store.read(store.item("account", "owner", 2)) == b"cy"

    def test_comments_and_blank_lines(self) -> None:
        """Comments and blank lines are ignored."""
        store = parse_store(
            "# header\n\ntable t key=id  # trailing\ncolumn id fixed\nrow 4\n"
        )
        assert store.lookup("t", 4) == 0

    def test_empty_var_value(self) -> None:
        """A lone ``x`` is the empty string."""
        store = parse_store("table t key=id\ncolumn id fixed\ncolumn s var\nrow 1 x\n")
        assert store.read(store.item("t", "s", 0)) == b""

    @pytest.mark.parametrize(
        ("text", "message"),
        [
            ("row 1\n", "line 1: 'row' before any table"),
            ("table t key=id\ncolumn id fixed\nrow 1 2\n", "line 3: expected 1 values"),
            ("table t key=id\ncolumn id fixed\nrow one\n", "line 3: bad integer"),
            ("table t key=id\ncolumn id fixed\ncolumn s var\nrow 1 abc\n", "line 4"),
            ("table t key=id\ncolumn id fixed\nrow 1\ncolumn x fixed\n", "after rows"),
            ("table t key=id colour=red\n", "unknown table option"),
            ("index t\n", "unknown statement"),
        ],
    )
    def test_errors_name_the_line(self, text: str, message: str) -> None:
        """Malformed input raises SchemaError with a location."""
        with pytest.raises(SchemaError, match=message):
            parse_store(text)

    def test_invalid_schema(self) -> None:
        """Schema validation errors surface as SchemaError."""
        with pytest.raises(SchemaError, match="fixed-length"):
            parse_store("table t key=id\ncolumn id var\n")

    def test_duplicate_keys(self) -> None:
        """Two rows with one key are rejected."""
        with pytest.raises(SchemaError, match="line 4"):
            parse_store("table t key=id\ncolumn id fixed\nrow 1\nrow 1\n")


class TestDumpStore:
    """Tests for writing schema/load files."""

    def test_dump_then_load_is_equal(
        self, bank_store_path: pathlib.Path, tmp_path: pathlib.Path
    ) -> None:
        """A dumped store loads back with identical contents."""
        store = load_store(bank_store_path)
        store.write(store.item("account", "owner", 3), b"\x00\xffbinary")
        path = tmp_path / "out.store"
        dump_store(store, path)
        assert compare_snapshots(take_snapshot(store), take_snapshot(load_store(path))) is None

    def test_deleted_rows_are_omitted(self, bank_store_path: pathlib.Path) -> None:
        """Only live rows are written."""
        store = load_store(bank_store_path)
        store.table("account").delete(0)
        text = format_store(store)
        assert "row 0 " not in text
        assert text.count("\nrow ") == 7
        assert text.startswith("table account key=id partition=id\n")
