"""CSV and JSON table writers with embedded run metadata.

Floats are written with 17 significant digits (CSV) or as shortest round-trip
``repr`` (JSON), so reading a table back reproduces every double exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def _plain(value):
    """Convert numpy scalars and arrays to built-in Python types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_cell(value):
    value = _plain(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return "%.17g" % value
    return str(value)


def render_csv(columns, rows, meta):
    buf = io.StringIO()
    for key in meta:
        buf.write(f"# {key}: {json.dumps(_plain(meta[key]), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def render_json(columns, rows, meta):
    records = [dict(zip(columns, _plain(list(row)))) for row in rows]
    payload = {"meta": _plain(meta), "rows": records}
    return json.dumps(_json_safe(payload), indent=2, allow_nan=False) + "\n"


def render(columns, rows, meta, fmt):
    if fmt == "csv":
        return render_csv(columns, rows, meta)
    if fmt == "json":
        return render_json(columns, rows, meta)
    raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(text):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(text, fmt):
    """Parse rendered output back into ``(meta, columns, rows)``."""
    if fmt == "json":
        payload = json.loads(text)
        rows = payload["rows"]
        columns = list(rows[0]) if rows else []
        return payload["meta"], columns, [[r[c] for c in columns] for r in rows]
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, raw = line[2:].partition(": ")
            meta[key] = json.loads(raw)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse_cell(c) for c in row] for row in reader]
    return meta, columns, rows
