"""Canonical JSON and matrix (de)serialization shared by reports, configs and CDGA files."""

from __future__ import annotations

import math
import hashlib
import json
from pathlib import Path

import numpy as np

from .exact import QQ, ExactMatrix, Field


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def write_report(report: dict, out) -> None:
    text = canonical_json(report)
    if out in (None, "-"):
        print(text, end="")
    else:
        Path(out).write_text(text, encoding="utf-8")


def matrix_to_json(m: ExactMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[r, c, m.field.format(v)] for r, c, v in m.entries]}


def dense_to_json(arr, fld: Field = QQ) -> dict:
    arr = np.asarray(arr)
    return matrix_to_json(ExactMatrix.from_dense(arr.reshape(arr.shape[0], math.prod(arr.shape[1:])) if arr.ndim != 2 else arr, fld))


def matrix_from_json(doc, fld: Field = QQ) -> ExactMatrix:
    """Accept ``{"rows", "cols", "entries": [[r, c, "p/q"], ...]}`` or a nested list of rows."""
    if isinstance(doc, list):
        return ExactMatrix.from_dense([[fld.convert(v) for v in row] for row in doc], fld) if doc else ExactMatrix.zeros(0, 0, fld)
    rows, cols = int(doc["rows"]), int(doc["cols"])
    trip = []
    for e in doc.get("entries", []):
        r, c, v = e
        if not (0 <= int(r) < rows and 0 <= int(c) < cols):
            raise ValueError(f"entry ({r}, {c}) outside a {rows} x {cols} matrix")
        trip.append((int(r), int(c), fld.convert(v)))
    return ExactMatrix.from_triplets(rows, cols, trip, fld)
