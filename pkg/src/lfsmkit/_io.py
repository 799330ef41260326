"""Small file-format helpers shared by the export functions."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def write_f8(path, values) -> None:
    """Raw little-endian float64."""
    np.asarray(values, dtype="<f8").tofile(Path(path))


def read_f8(path) -> np.ndarray:
    return np.fromfile(Path(path), dtype="<f8")


def write_csv(path, header: str, *columns, fmt=None) -> None:
    """Write columns as CSV with a header line.

    Floats use ``%.17g`` so the text round-trips to the same doubles.
    """
    cols = [np.asarray(c) for c in columns]
    if fmt is None:
        fmt = ["%d" if np.issubdtype(c.dtype, np.integer) else "%.17g" for c in cols]
    data = np.column_stack(cols) if len(cols) > 1 else cols[0].reshape(-1, 1)
    with open(Path(path), "w", newline="\n") as fh:
        fh.write(header + "\n")
        if data.size:
            np.savetxt(fh, data, fmt=fmt, delimiter=",")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(Path(path)) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    return header, data


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
