"""Deterministic CSV / JSON writers used by the command line tool."""

import contextlib
import csv
import json
import math
import sys

import numpy as np

__all__ = ["format_value", "thin_rows", "write_csv", "write_json"]


def format_value(value):
    """17 significant digits for floats so values round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


@contextlib.contextmanager
def _open(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, header, rows):
    """One header line then ``rows``; ``path=None`` writes to stdout."""
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} cannot be written as JSON")
        return value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    with _open(path) as fh:
        json.dump(_plain(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")


def thin_rows(n, max_rows):
    """Indices keeping at most ``max_rows`` of ``n`` rows, always the first and last."""
    if max_rows is None or n <= max_rows:
        return np.arange(n)
    if max_rows < 2:
        raise ValueError("max_rows must be at least 2")
    return np.unique(np.linspace(0, n - 1, max_rows).round().astype(int))
