"""Tabular export: CSV or JSON-lines with shortest round-trip float formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import ComplexSeries, to_phase_space
from .errors import DomainError

FORMATS = ("csv", "jsonl")


def format_number(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _json_value(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not math.isfinite(value):
            return repr(value)
        return value
    return value


def write_table(path, columns: dict, fmt: str = "csv") -> Path:
    """Write equal-length columns; an empty table produces a header-only CSV."""
    if fmt not in FORMATS:
        raise DomainError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    names = list(columns)
    data = [list(columns[n]) for n in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise DomainError(f"columns have different lengths: {sorted(lengths)}")
    rows = zip(*data)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if fmt == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(names)
                for row in rows:
                    writer.writerow([format_number(v) for v in row])
            else:
                for row in rows:
                    record = {n: _json_value(v) for n, v in zip(names, row)}
                    fh.write(json.dumps(record) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_table(path, fmt: str = "csv") -> dict:
    """Inverse of :func:`write_table` for numeric columns."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        if fmt == "csv":
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        else:
            records = [json.loads(line) for line in fh if line.strip()]
            header = list(records[0]) if records else []
            rows = [[r[n] for n in header] for r in records]
    cols = {n: [] for n in header}
    for row in rows:
        for n, v in zip(header, row):
            cols[n].append(float(v))
    return {n: np.array(v, dtype=float) for n, v in cols.items()}


def export_series(series, path, fmt: str = "csv", kind: str = "complex") -> Path:
    """Columns ``tau,re,im`` (``kind="complex"``) or ``tau,x,p`` (``kind="phase_space"``).

    ``series`` is a :class:`ComplexSeries` or a ``(tau, values)`` pair, which may be empty.
    """
    if isinstance(series, ComplexSeries):
        tau, values = series.times, series.values
    else:
        tau, values = (np.asarray(v) for v in series)
        values = values.astype(complex)
    if kind == "complex":
        cols = {"tau": tau, "re": values.real, "im": values.imag}
    elif kind == "phase_space":
        x = np.sqrt(2.0) * values.real
        p = np.sqrt(2.0) * values.imag
        if isinstance(series, ComplexSeries):
            x, p = to_phase_space(series)
        cols = {"tau": tau, "x": x, "p": p}
    else:
        raise DomainError(f"unknown series kind {kind!r}")
    return write_table(path, cols, fmt)


def export_spectrum(spec, path, fmt: str = "csv", columns: str = "magnitude") -> Path:
    """Two-column ``nu,magnitude`` or three-column ``nu,re,im``, over the searched band."""
    mask = spec.band_mask()
    nu = spec.freqs[mask]
    amp = spec.amplitudes[mask]
    if columns == "magnitude":
        cols = {"nu": nu, "magnitude": np.abs(amp)}
    elif columns == "complex":
        cols = {"nu": nu, "re": amp.real, "im": amp.imag}
    else:
        raise DomainError(f"unknown spectrum columns {columns!r}")
    return write_table(path, cols, fmt)
