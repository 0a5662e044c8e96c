"""Columnar tables with CSV ingestion and schema inference.

A table is an ordered list of typed columns; every cell is one of
``str`` (TEXT), ``int`` (INTEGER), ``float`` (REAL) or ``None`` (missing).
Tables are immutable by convention: operations return new tables.

CSV follows RFC 4180 (comma delimiter, double-quote escaping, UTF-8).
The parser tracks which fields were quoted so that quoted numerals stay
text, which makes table -> CSV -> table a true round trip.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CardpipeError

TEXT = "TEXT"
INTEGER = "INTEGER"
REAL = "REAL"
DTYPES = (TEXT, INTEGER, REAL)

Cell = str | int | float | None

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_INT_RE = re.compile(r"[+-]?[0-9]+$")
_REAL_RE = re.compile(r"[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$")


class CsvParseError(CardpipeError):
    code = "CSV_PARSE"

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class CsvValidationError(CardpipeError):
    code = "CSV_INVALID"


class TableInvariantError(CardpipeError):
    code = "TABLE_INVARIANT"


@dataclass(frozen=True)
class Column:
    name: str
    dtype: str
    cells: tuple[Cell, ...]

    def __post_init__(self):
        if not self.name:
            raise TableInvariantError("column name must be non-empty")
        if self.dtype not in DTYPES:
            raise TableInvariantError(f"unknown dtype {self.dtype!r}")
        object.__setattr__(self, "cells", tuple(self.cells))
        for cell in self.cells:
            if cell is None:
                continue
            if self.dtype == TEXT and not isinstance(cell, str):
                raise TableInvariantError(f"TEXT column {self.name!r} holds {cell!r}")
            if self.dtype == INTEGER and not (isinstance(cell, int) and not isinstance(cell, bool)):
                raise TableInvariantError(f"INTEGER column {self.name!r} holds {cell!r}")
            if self.dtype == REAL:
                if not isinstance(cell, float):
                    raise TableInvariantError(f"REAL column {self.name!r} holds {cell!r}")
                if not math.isfinite(cell):
                    raise TableInvariantError(f"REAL column {self.name!r} holds non-finite {cell!r}")


@dataclass(frozen=True)
class Table:
    columns: tuple[Column, ...]
    provenance: str = field(default="<constructed>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise TableInvariantError(f"duplicate column names: {names}")
        lengths = {len(c.cells) for c in self.columns}
        if len(lengths) > 1:
            raise TableInvariantError(f"ragged columns: lengths {sorted(lengths)}")

    @property
    def row_count(self) -> int:
        return len(self.columns[0].cells) if self.columns else 0

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def row(self, index: int) -> tuple[Cell, ...]:
        return tuple(c.cells[index] for c in self.columns)

    def rows(self) -> list[tuple[Cell, ...]]:
        return [self.row(i) for i in range(self.row_count)]

    def take_rows(self, indexes: Sequence[int], provenance: str | None = None) -> "Table":
        cols = tuple(
            Column(c.name, c.dtype, tuple(c.cells[i] for i in indexes)) for c in self.columns
        )
        return Table(cols, provenance or self.provenance)

    def to_json(self) -> dict:
        """Column-major JSON form; missing cells become null."""
        return {
            "columns": [
                {"name": c.name, "dtype": c.dtype, "cells": list(c.cells)} for c in self.columns
            ],
            "row_count": self.row_count,
        }

    @staticmethod
    def from_json(doc: dict) -> "Table":
        cols = tuple(Column(c["name"], c["dtype"], tuple(c["cells"])) for c in doc["columns"])
        return Table(cols)


def _parse_int(text: str) -> int | None:
    text = text.strip()
    if not _INT_RE.fullmatch(text):
        return None
    value = int(text)
    if not (INT64_MIN <= value <= INT64_MAX):
        return None
    return value


def _parse_real(text: str) -> float | None:
    text = text.strip()
    if not _REAL_RE.fullmatch(text):
        return None
    value = float(text)
    if not math.isfinite(value):
        return None
    return value


def _infer_dtype(fields: Iterable[tuple[str, bool]]) -> str:
    """Dtype for one column of ``(text, was_quoted)`` fields.

    INTEGER if every non-empty field is an in-range integer literal, else
    REAL if every non-empty field is a finite decimal literal, else TEXT.
    Quoted fields are always text, so a quoted numeral pins the column to
    TEXT (this is what makes serialization with quoting a round trip).
    """
    could_int = True
    for text, quoted in fields:
        if quoted:
            return TEXT
        if text == "":
            continue
        if _INT_RE.fullmatch(text.strip()):
            if _parse_int(text) is None:
                return TEXT  # integer literal past 64 bits: never degrade to float
            continue
        could_int = False
        if _parse_real(text) is None:
            return TEXT
    return INTEGER if could_int else REAL


def infer_schema(raw_columns: Sequence[Sequence[str]]) -> list[str]:
    """Infer a dtype per column from raw text fields (empty field = missing)."""
    return [_infer_dtype((text, False) for text in col) for col in raw_columns]


def _convert(text: str, quoted: bool, dtype: str) -> Cell:
    if text == "" and not quoted:
        return None
    if dtype == INTEGER:
        value = _parse_int(text)
        assert value is not None
        return value
    if dtype == REAL:
        value = _parse_real(text)
        assert value is not None
        return value
    return text


def _read_records(text: str, delimiter: str) -> list[list[tuple[str, bool]]]:
    """RFC 4180 reader that remembers whether each field was quoted."""
    records: list[list[tuple[str, bool]]] = []
    fields: list[tuple[str, bool]] = []
    buf: list[str] = []
    quoted = False
    in_quotes = False
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < n and text[i + 1] == '"':
                    buf.append('"')
                    i += 2
                    continue
                in_quotes = False
                i += 1
                continue
            buf.append(ch)
            i += 1
            continue
        if ch == '"' and not buf:
            in_quotes = True
            quoted = True
            i += 1
            continue
        if ch == delimiter:
            fields.append(("".join(buf), quoted))
            buf, quoted = [], False
            i += 1
            continue
        if ch == "\r" or ch == "\n":
            if ch == "\r" and i + 1 < n and text[i + 1] == "\n":
                i += 1
            # a newline always terminates a record, so a blank line is a
            # record with one empty field (how an all-missing row serializes)
            fields.append(("".join(buf), quoted))
            records.append(fields)
            fields, buf, quoted = [], [], False
            i += 1
            continue
        buf.append(ch)
        i += 1
    if in_quotes:
        raise CsvParseError("unterminated quoted field", row=len(records) + 1)
    if fields or buf or quoted:
        fields.append(("".join(buf), quoted))
        records.append(fields)
    return records


def parse_csv(
    data: bytes | str,
    *,
    delimiter: str = ",",
    header: bool = True,
    provenance: str = "<csv>",
) -> Table:
    """Parse CSV text into a typed table.

    Row numbers in errors are 1-based record numbers including the header.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CsvParseError(f"not valid UTF-8: {exc}") from None
    else:
        text = data

    records = _read_records(text, delimiter)
    if not records:
        raise CsvParseError("no header row")

    if header:
        names = [f[0] for f in records[0]]
        data_records = records[1:]
        data_start = 2
    else:
        names = [f"col_{i + 1}" for i in range(len(records[0]))]
        data_records = records
        data_start = 1

    if any(not name for name in names):
        raise CsvValidationError("empty header name")
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise CsvValidationError(f"duplicate header: {', '.join(dupes)}")

    width = len(names)
    for offset, record in enumerate(data_records):
        if len(record) != width:
            raise CsvParseError(
                f"expected {width} fields, got {len(record)}", row=data_start + offset
            )

    raw_columns: list[list[tuple[str, bool]]] = [
        [record[j] for record in data_records] for j in range(width)
    ]
    dtypes = [_infer_dtype(col) for col in raw_columns]
    columns = tuple(
        Column(names[j], dtypes[j], tuple(_convert(t, q, dtypes[j]) for t, q in raw_columns[j]))
        for j in range(width)
    )
    return Table(columns, provenance)


def _needs_quote(text: str, delimiter: str) -> bool:
    if text == "":
        return True
    if any(ch in text for ch in (delimiter, '"', "\r", "\n")):
        return True
    # protect numeric-looking text from being re-inferred as a number
    stripped = text.strip()
    return bool(_INT_RE.fullmatch(stripped) or _REAL_RE.fullmatch(stripped))


def _write_field(text: str, delimiter: str, force_quote: bool) -> str:
    if force_quote or _needs_quote(text, delimiter):
        return '"' + text.replace('"', '""') + '"'
    return text


def format_cell(cell: Cell) -> str:
    """Canonical text for one cell; floats use shortest round-trip form."""
    if cell is None:
        return ""
    if isinstance(cell, float):
        return repr(cell)
    return str(cell)


def serialize_csv(table: Table, *, delimiter: str = ",", quote_text: bool = False) -> str:
    """Serialize a table to CSV, header first.

    TEXT cells that could be mistaken for numbers are always quoted; with
    ``quote_text`` every TEXT cell is quoted, which preserves text/number
    distinctions for any table.
    """
    lines = [delimiter.join(_write_field(c.name, delimiter, False) for c in table.columns)]
    for i in range(table.row_count):
        parts = []
        for col in table.columns:
            cell = col.cells[i]
            if cell is None:
                parts.append("")
            elif col.dtype == TEXT:
                parts.append(_write_field(str(cell), delimiter, quote_text))
            else:
                parts.append(format_cell(cell))
        lines.append(delimiter.join(parts))
    return "\r\n".join(lines) + "\r\n"
