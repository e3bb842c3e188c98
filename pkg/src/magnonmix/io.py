"""CSV and JSON writers with locale-free, round-trip float formatting.

CSV files carry ``# key=value`` comment lines before a single header row.
Floats are written with ``repr`` (shortest round-trip form), so identical
inputs give byte-identical files.
"""
import hashlib
import json
import math
from pathlib import Path

import numpy as np


def fmt(x):
    """Shortest round-trip text for a scalar."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _header(meta):
    lines = []
    for key in sorted(meta or {}):
        lines.append(f"# {key}={fmt(meta[key])}")
    return lines


def csv_text(columns, rows, meta=None):
    """CSV text for ``rows`` (iterables of scalars) under ``columns``."""
    lines = _header(meta)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def matrix_csv_text(values, rows, cols, row_name, col_name, meta=None):
    """Matrix with the column axis as the header row and the row axis first."""
    lines = _header(meta)
    lines.append(",".join([f"{row_name}\\{col_name}"] + [fmt(c) for c in cols]))
    for r, vals in zip(rows, values):
        lines.append(",".join([fmt(r)] + [fmt(v) for v in vals]))
    return "\n".join(lines) + "\n"


def read_matrix_csv(path):
    """Inverse of :func:`matrix_csv_text`: ``(meta, rows, cols, values)``."""
    meta, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        else:
            body.append(line.split(","))
    cols = np.array([float(c) for c in body[0][1:]])
    rows = np.array([float(r[0]) for r in body[1:]])
    try:
        values = np.array([[float(v) for v in r[1:]] for r in body[1:]])
    except ValueError:
        values = np.array([r[1:] for r in body[1:]], dtype=object)
    return meta, rows, cols, values


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if not math.isfinite(x) else x
    return obj


def json_text(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path, text):
    """Write ``text`` and return its sha256 digest."""
    path = Path(path)
    data = text.encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()
