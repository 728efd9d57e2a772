"""CSV and JSON writers for simulation results.

Numbers are written with 17 significant digits so that doubles round-trip
exactly; non-finite values are refused rather than written as NaN/Inf.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord

INCOMPLETE = "INCOMPLETE"
SNAPSHOT_HEADER = ["x", "P", "N", "Psi"]
SERIES_HEADER = [
    "k", "t", "minP", "maxP", "minN", "maxN", "h1Psi", "h1P", "h1N",
    "JP0", "JP1", "JN0", "JN1", "massResP", "massResN", "stationarity",
]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"refusing to write non-finite value {value!r}")
    return format(value, ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows)


def snapshot_name(t: float) -> str:
    return f"snap_t{t:.10g}.csv"


def write_snapshot(path, state, grid) -> None:
    rows = zip(grid.nodes, state.P, state.N, state.Psi)
    write_csv(path, SNAPSHOT_HEADER, rows)


def write_series(path, records) -> None:
    assert SERIES_HEADER == DiagnosticsRecord.columns()
    write_csv(path, SERIES_HEADER, (r.row() for r in records))


def _check_finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"refusing to write non-finite value {obj!r}")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _check_finite(v)


def write_json(path, data) -> None:
    _check_finite(data)
    text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def mark_incomplete(out_dir) -> None:
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    (Path(out_dir) / INCOMPLETE).write_text("run did not complete\n", encoding="utf-8")


def mark_complete(out_dir) -> None:
    sentinel = Path(out_dir) / INCOMPLETE
    if sentinel.exists():
        sentinel.unlink()
