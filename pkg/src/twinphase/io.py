"""Deterministic JSON and CSV writers.

Reals go to CSV with 17 significant digits, which round-trips a double;
integers are written exactly.  JSON uses sorted keys and Python's
shortest round-trip float repr, so equal inputs give equal bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


def _plain(obj):
    # numpy scalars and arrays -> builtin types; complex -> [re, im]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return v
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, rows: Iterable[Sequence]) -> None:
    Path(path).write_text(csv_text(rows))


def expsum_record(operation: str, inputs: dict, value, bound_terms=(), ratios=()) -> dict:
    """The JSON record emitted for exponential-sum evaluations."""
    value = complex(value)
    return {
        "schema": SCHEMA_VERSION,
        "operation": operation,
        "inputs": _plain(inputs),
        "value_re": value.real,
        "value_im": value.imag,
        "bound_terms": [float(t) for t in bound_terms],
        "ratios": [float(r) for r in ratios],
    }
