"""
Table declarations for the column store.

A table has fixed-length columns (64-bit integers, stored as arrays) and
variable-length columns (byte strings, stored as offset + length into a byte
pool). The primary key must be a fixed column; the partition key names the
column whose value routes a row to a partition.
"""

from __future__ import annotations

import re
from typing import Literal, Self

from pydantic import BaseModel, field_validator, model_validator

from bulktx.storage.items import MAX_COLUMNS

_NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ColumnDef(BaseModel):
    """
    A column declaration.

    Attributes
    ----------
    name : str
        Column name, an identifier.
    kind : {"fixed", "var"}
        ``fixed`` columns hold int64 cells, ``var`` columns hold byte strings.
    """

    name: str
    kind: Literal["fixed", "var"] = "fixed"

    model_config = {"extra": "forbid", "frozen": True}

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        """Validate that the column name is an identifier."""
        if not _NAME_PATTERN.match(v):
            raise ValueError(f"column name must be an identifier, got '{v}'")
        return v


class TableSchema(BaseModel):
    """
    A table declaration.

    Attributes
    ----------
    name : str
        Table name, an identifier.
    columns : tuple[ColumnDef, ...]
        Columns in storage order; column indexes follow this order.
    primary_key : str
        Name of the fixed column holding the primary key.
    partition_key : str | None
        Name of the column routing rows to partitions. Defaults to the primary key.
    """

    name: str
    columns: tuple[ColumnDef, ...]
    primary_key: str
    partition_key: str | None = None

    model_config = {"extra": "forbid", "frozen": True}

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        """Validate that the table name is an identifier."""
        if not _NAME_PATTERN.match(v):
            raise ValueError(f"table name must be an identifier, got '{v}'")
        return v

    @model_validator(mode="after")
    def validate_columns(self) -> Self:
        """Validate column names, count, and key columns."""
        if not self.columns:
            raise ValueError(f"table '{self.name}' must declare at least one column")
        if len(self.columns) > MAX_COLUMNS:
            raise ValueError(f"table '{self.name}' declares more than {MAX_COLUMNS} columns")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"table '{self.name}' has duplicate column names")
        by_name = {c.name: c for c in self.columns}
        pk = by_name.get(self.primary_key)
        if pk is None:
            raise ValueError(f"primary key '{self.primary_key}' is not a column of '{self.name}'")
        if pk.kind != "fixed":
            raise ValueError("primary key column must be fixed-length")
        if self.partition_key is not None and self.partition_key not in by_name:
            raise ValueError(
                f"partition key '{self.partition_key}' is not a column of '{self.name}'"
            )
        return self

    def column_index(self, name: str) -> int:
        """Return the storage index of column ``name``."""
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise KeyError(f"table '{self.name}' has no column '{name}'")

    @property
    def primary_key_index(self) -> int:
        return self.column_index(self.primary_key)

    @property
    def partition_key_index(self) -> int:
        return self.column_index(self.partition_key or self.primary_key)
