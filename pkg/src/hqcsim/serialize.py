"""Deterministic text serialization: fixed float formatting, stable field order.

Every artifact (CSV, JSON) is regression-diffable: identical inputs produce
byte-identical files.  Floats are rendered with 12 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np


def fmt(value: float) -> str:
    """Render a float with 12 significant digits (empty string for NaN)."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(float(value), ".12g")


def round_sig(value: float) -> float:
    """Round a float to 12 significant digits (stable JSON rendering)."""
    return float(fmt(value)) if fmt(value) else float("nan")


def complex_pairs(matrix: np.ndarray) -> list:
    """Nested [re, im] pairs for a complex vector or matrix."""
    arr = np.asarray(matrix)
    if arr.ndim == 1:
        return [[round_sig(z.real), round_sig(z.imag)] for z in arr]
    return [complex_pairs(row) for row in arr]


def json_ready(obj: Any) -> Any:
    """Recursively convert floats/arrays so json.dumps output is stable."""
    if isinstance(obj, dict):
        return {k: json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return round_sig(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return json_ready(obj.tolist())
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(json_ready(payload), indent=2) + "\n", encoding="utf-8")


def csv_text(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"
