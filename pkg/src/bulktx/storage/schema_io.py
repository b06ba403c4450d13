"""
Line-oriented schema/load file.

Grammar (one statement per line, ``#`` starts a comment)::

    table <name> key=<column> [partition=<column>]
    column <name> fixed|var
    row <value> <value> ...

``column`` and ``row`` lines belong to the most recent ``table``; all columns
of a table precede its rows. Fixed values are decimal integers; variable-length
values are ``x`` followed by the hex digits of the bytes (``x`` alone is the
empty string). Example::

    table branch key=id
    column id fixed
    column balance fixed
    column name var
    row 0 1000 x6e6f727468

:func:`dump_store` writes the live rows of a store in this format, and
:func:`load_store` reads it back into an equal store.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from pydantic import ValidationError

from bulktx.exceptions import SchemaError
from bulktx.storage.column_store import CellValue, ColumnStore
from bulktx.storage.schema import TableSchema

if TYPE_CHECKING:
    import os


def _parse_value(token: str, kind: str, lineno: int) -> CellValue:
    if kind == "var":
        if not token.startswith("x"):
            raise SchemaError(f"line {lineno}: variable-length value must start with 'x'")
        try:
            return bytes.fromhex(token[1:])
        except ValueError:
            raise SchemaError(f"line {lineno}: bad hex value '{token}'") from None
    try:
        return int(token)
    except ValueError:
        raise SchemaError(f"line {lineno}: bad integer '{token}'") from None


def _format_value(value: CellValue) -> str:
    if isinstance(value, bytes):
        return "x" + value.hex()
    return str(value)


def parse_store(text: str, insert_capacity: int = 1 << 20) -> ColumnStore:
    """Build a store from schema/load text."""
    decls: list[dict[str, object]] = []
    rows: list[list[tuple[int, list[str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        if word == "table":
            if not rest:
                raise SchemaError(f"line {lineno}: table needs a name")
            decl: dict[str, object] = {"name": rest[0], "columns": []}
            for opt in rest[1:]:
                key, sep, value = opt.partition("=")
                if not sep or key not in ("key", "partition"):
                    raise SchemaError(f"line {lineno}: unknown table option '{opt}'")
                decl["primary_key" if key == "key" else "partition_key"] = value
            decls.append(decl)
            rows.append([])
        elif word in ("column", "row"):
            if not decls:
                raise SchemaError(f"line {lineno}: '{word}' before any table")
            if word == "column":
                if rows[-1]:
                    raise SchemaError(f"line {lineno}: column declared after rows")
                if len(rest) != 2:
                    raise SchemaError(f"line {lineno}: expected 'column <name> fixed|var'")
                columns = decls[-1]["columns"]
                assert isinstance(columns, list)
                columns.append({"name": rest[0], "kind": rest[1]})
            else:
                rows[-1].append((lineno, rest))
        else:
            raise SchemaError(f"line {lineno}: unknown statement '{word}'")

    try:
        schemas = [TableSchema.model_validate(d) for d in decls]
    except ValidationError as e:
        raise SchemaError(str(e)) from e

    store = ColumnStore(schemas, insert_capacity=insert_capacity)
    for schema, table_rows in zip(schemas, rows, strict=True):
        kinds = [c.kind for c in schema.columns]
        for lineno, tokens in table_rows:
            if len(tokens) != len(kinds):
                raise SchemaError(
                    f"line {lineno}: expected {len(kinds)} values, got {len(tokens)}"
                )
            values = [_parse_value(tok, k, lineno) for tok, k in zip(tokens, kinds, strict=True)]
            try:
                store.append_row(schema.name, values)
            except Exception as e:
                raise SchemaError(f"line {lineno}: {e}") from e
    return store


def load_store(path: str | os.PathLike[str], insert_capacity: int = 1 << 20) -> ColumnStore:
    """Read a schema/load file."""
    with open(path) as f:
        return parse_store(f.read(), insert_capacity=insert_capacity)


def format_schema(schema: TableSchema) -> list[str]:
    head = f"table {schema.name} key={schema.primary_key}"
    if schema.partition_key is not None:
        head += f" partition={schema.partition_key}"
    return [head] + [f"column {c.name} {c.kind}" for c in schema.columns]


def format_store(store: ColumnStore) -> str:
    """Render the schema and live rows of ``store``."""
    lines: list[str] = []
    for t in store.tables:
        lines.extend(format_schema(t.schema))
        for r in t.live_rows():
            lines.append("row " + " ".join(_format_value(v) for v in t.row_values(int(r))))
    return "\n".join(lines) + "\n"


def dump_store(store: ColumnStore, path: str | os.PathLike[str]) -> None:
    with open(path, "w") as f:
        f.write(format_store(store))

