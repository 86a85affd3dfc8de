"""Row schemas and CSV / JSON emission.

CSV reals use 17 significant digits so a 53-bit value survives the round
trip; JSON floats use Python's shortest round-trip repr. Both are
byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping, Sequence

from .errors import NumericalFailure

__all__ = ["format_csv", "format_json", "load_schemas", "parse_csv", "schema_columns", "emit"]


@lru_cache(maxsize=1)
def load_schemas() -> dict[str, Any]:
    text = resources.files("gapasym").joinpath("schemas.json").read_text(encoding="utf-8")
    return json.loads(text)


def schema_columns(schema: str) -> list[str]:
    return list(load_schemas()[schema]["columns"])


def _check_row(schema: str, columns: Sequence[str], row: Mapping[str, Any]) -> None:
    if list(row) != list(columns):
        raise ValueError(f"row keys {list(row)} do not match the {schema} schema {list(columns)}")
    for key, value in row.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise NumericalFailure(f"non-finite value in column {key!r}: {value!r}")


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_csv(schema: str, rows: Sequence[Mapping[str, Any]]) -> str:
    columns = schema_columns(schema)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        _check_row(schema, columns, row)
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def format_json(
    command: str, schema: str, parameters: Mapping[str, Any], rows: Sequence[Mapping[str, Any]]
) -> str:
    columns = schema_columns(schema)
    for row in rows:
        _check_row(schema, columns, row)
    doc = {"command": command, "parameters": dict(parameters), "rows": [dict(r) for r in rows]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def parse_csv(schema: str, text: str) -> list[dict[str, Any]]:
    """Read CSV produced by format_csv back into typed rows."""
    entry = load_schemas()[schema]
    columns, types = entry["columns"], entry["types"]
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != columns:
        raise ValueError(f"header {header} does not match the {schema} schema")
    convert = {"int": int, "real": float, "label": str}
    return [{c: convert[types[c]](v) for c, v in zip(columns, line)} for line in reader]


def emit(text: str, destination: str | None) -> None:
    """Write to `destination`, or standard output when it is None or '-'."""
    if destination is None or destination == "-":
        import sys

        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
