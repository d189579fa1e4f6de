"""Series ingestion, transforms, run manifests and report serialization."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .conventions import Series
from .errors import DataError, EmptySeries, ParseError

TRANSFORMS = ("none", "pct-change", "squared-pct-change")
TIME_COLUMNS = ("t", "time", "date")


def _number(text: str) -> Optional[float]:
    try:
        x = float(text)
    except ValueError:
        return None
    return x if math.isfinite(x) else None


def read_values(path, column: Optional[str] = None) -> np.ndarray:
    """Values of the single data column of a CSV file.

    A header row is optional. Columns named ``t``, ``time`` or ``date`` are
    ignored, since the observation grid is always rebuilt as ``i/n``.
    Without a header the last column is used.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    rows = [(k, r) for k, r in enumerate(csv.reader(text.splitlines()), start=1)
            if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptySeries(f"{path} contains no data")
    first = [c.strip() for c in rows[0][1]]
    if all(_number(c) is None for c in first):
        header = [c.lower() for c in first]
        rows = rows[1:]
        if column is not None:
            if column.lower() not in header:
                raise DataError(f"column {column!r} not in header {first}")
            idx = header.index(column.lower())
        else:
            data = [j for j, h in enumerate(header) if h not in TIME_COLUMNS]
            if not data:
                raise DataError("header has no value column")
            if len(data) > 1 and "y" in header:
                data = [header.index("y")]
            if len(data) > 1:
                raise DataError(f"several value columns {first}; pick one with --column")
            idx = data[0]
    else:
        if column is not None:
            raise DataError("--column needs a header row")
        idx = len(first) - 1
    if not rows:
        raise EmptySeries(f"{path} has a header but no data rows")
    out = np.empty(len(rows))
    for j, (line, row) in enumerate(rows):
        cell = row[idx].strip() if idx < len(row) else ""
        x = _number(cell)
        if x is None:
            raise ParseError(line, f"not a finite number: {cell!r}")
        out[j] = x
    return out


def pct_change(x) -> np.ndarray:
    """``(x_t / x_{t-1} - 1) * 100``."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise EmptySeries("percentage change needs at least two values")
    if np.any(x[:-1] == 0):
        raise DataError("percentage change undefined after a zero value")
    return (x[1:] / x[:-1] - 1.0) * 100.0


def squared_pct_change(x) -> np.ndarray:
    return pct_change(x) ** 2


def apply_transform(x, transform: str = "none") -> np.ndarray:
    if transform == "none":
        return np.asarray(x, dtype=float)
    if transform == "pct-change":
        return pct_change(x)
    if transform == "squared-pct-change":
        return squared_pct_change(x)
    raise DataError(f"unknown transform {transform!r}; choose from {', '.join(TRANSFORMS)}")


def ingest(path, transform: str = "none", column: Optional[str] = None) -> Series:
    values = apply_transform(read_values(path, column), transform)
    if values.size < 2:
        raise EmptySeries(f"{path} yields fewer than two observations")
    return Series(values)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def make_manifest(subcommand: str, parameters: dict, input_path=None,
                  transform: str = "none", column: Optional[str] = None) -> dict:
    """Everything needed to regenerate a report byte for byte."""
    manifest = {
        "tool": "corrbreak",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": dict(parameters),
        "input": None,
    }
    if input_path is not None:
        manifest["input"] = {
            "path": str(input_path),
            "sha256": file_digest(input_path),
            "transform": transform,
            "column": column,
        }
    return manifest


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("corrbreak").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict):
    """Raise ``jsonschema.ValidationError`` if ``report`` breaks the published schema."""
    import jsonschema

    jsonschema.validate(json.loads(dumps(report)), load_schema())
