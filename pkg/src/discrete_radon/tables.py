"""CSV / JSON table output with a fixed column order and 17 significant digits for reals."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Optional, Sequence

FORMATS = ("csv", "json")


def _cell(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(_json_value(v))
    return v


def _json_value(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, tuple):
        return [_json_value(x) for x in v]
    if isinstance(v, list):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if hasattr(v, "item") and callable(v.item):
        return v.item()
    return v


def render_table(rows: Sequence[dict], fmt: str = "csv", columns: Optional[Sequence[str]] = None) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if columns is None:
        columns = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
        return buf.getvalue()
    return json.dumps({"columns": list(columns), "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows]}, indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, so no partial file is left on failure."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_table(rows: Sequence[dict], path: str, fmt: str = "csv", columns: Optional[Sequence[str]] = None) -> None:
    write_atomic(path, render_table(rows, fmt, columns))


def read_table(path: str) -> list[dict]:
    """Read back a table written by emit_table (values as parsed by csv or json)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return json.loads(text)["rows"]
    return list(csv.DictReader(io.StringIO(text)))
