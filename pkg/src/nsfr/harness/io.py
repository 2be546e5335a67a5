"""File output: CSV tables and structured-grid field blocks.

All numeric output is written with repr-level (round-trip) precision.  The
2D field format is plain text: one block per variable with a header line
`variable dims origin spacing` followed by row-major values on the uniform
cell-center grid (masked cells emit nan).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_series_csv(path, series):
    return write_csv(path, series.COLUMNS, series.rows())


def write_field(path, mesh, cell_values: dict):
    """Structured-grid block format; `cell_values` maps name -> grid array."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dims = " ".join(str(int(k)) for k in mesh.n)
    origin = " ".join(fmt(mesh.xmin[a] + 0.5 * mesh.h[a])
                      for a in range(mesh.dim))
    spacing = " ".join(fmt(h) for h in mesh.h)
    with open(path, "w") as fh:
        for name, grid in cell_values.items():
            fh.write(f"{name} dims {dims} origin {origin} spacing {spacing}\n")
            flat = np.asarray(grid).reshape(-1)
            for i in range(0, flat.size, 8):
                fh.write(" ".join(fmt(v) for v in flat[i:i + 8]) + "\n")
    return path


def write_failure(path, failure, config_text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "failure": {
            "time": failure.time,
            "step": failure.step,
            "stage": failure.stage,
            "element": failure.element,
            "where": failure.where,
            "message": failure.message,
        },
        "config": config_text,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path
