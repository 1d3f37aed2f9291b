"""CSV and JSON emitters with a fixed number format.

Numbers are written with 9 significant digits (``format(v, ".9g")``), a ``.``
decimal separator and LF line endings, so output is byte-stable across
platforms. Non-finite values are written as ``nan``, ``inf`` and ``-inf``;
in JSON they become strings because JSON has no literal for them.
"""

from __future__ import annotations

import json
import math
from typing import Any

from hapqkd.harness import SeriesTable


def format_number(value: float) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".9g")
    return "0" if text == "-0" else text


def _csv_cell(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def table_to_csv(table: SeriesTable) -> str:
    header = list(table.columns)
    with_errors = table.has_errors
    if with_errors:
        header.append("error")
    lines = [",".join(_csv_cell(c) for c in header)]
    for row, err in zip(table.rows, table.errors):
        cells = [format_number(v) for v in row]
        if with_errors:
            cells.append(_csv_cell(err or ""))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json_value(value: Any) -> str:
    """Serialize with numbers in the same textual form as the CSV emitter."""
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, float)):
        text = format_number(value)
        return json.dumps(text) if text in ("nan", "inf", "-inf") else text
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(value: Any) -> str:
    return _json_value(value) + "\n"


def table_to_json(table: SeriesTable) -> str:
    doc = {"columns": list(table.columns), "rows": table.rows}
    if table.has_errors:
        doc["errors"] = table.errors
    return to_json(doc)
