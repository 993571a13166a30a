"""
MagLat - Result Files
=====================
Bit-stable JSON reports and CSV tables, written atomically.

Floats are written with 17 significant digits so that reading a file back
reproduces the in-memory values exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from config import OUTPUT, setup_logging
from .exceptions import OutputError

# Module logger
logger = setup_logging()


@dataclass
class Table:
    """A CSV table: header plus rows of plain values."""
    header: tuple[str, ...]
    rows: list[Sequence[Any]] = field(default_factory=list)


@dataclass
class ResultBundle:
    """A JSON report and named CSV tables produced by one task."""
    report: dict[str, Any]
    tables: dict[str, Table] = field(default_factory=dict)


# =============================================================================
# FORMATTING
# =============================================================================

def format_float(value: float) -> str:
    """17 significant digits; non-finite values become 'nan', 'inf' or '-inf'."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{OUTPUT.significant_digits}g}"


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to builtin values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def encode_json(value: Any, indent: int = 2, level: int = 0) -> str:
    """
    JSON text with sorted keys and 17-significant-digit floats.

    Non-finite floats are written as null.
    """
    value = _plain(value)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    if isinstance(value, complex):
        return encode_json({"real": value.real, "imag": value.imag}, indent, level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {encode_json(value[k], indent, level + 1)}"
                 for k in sorted(value, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{encode_json(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def encode_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_float(v) if isinstance(v, float) else _plain(v) for v in map(_plain, row)])
    return buffer.getvalue()


def read_csv(path: str | Path) -> Table:
    """Read a table back; integer-looking cells become int, the rest float."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        rows: list[Sequence[Any]] = []
        for raw in reader:
            rows.append([int(c) if c.lstrip("-").isdigit() else float(c) for c in raw])
    return Table(header, rows)


# =============================================================================
# WRITING
# =============================================================================

def write_atomic(path: Path, text: str) -> None:
    """
    Write `text` to a temporary file next to `path`, then rename it into place.

    Raises:
        OutputError: On any I/O failure.
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise OutputError(str(path), str(e)) from e
    logger.debug("Wrote %s (%d bytes)", path, len(text))


def write_bundle(bundle: ResultBundle, directory: str | Path,
                 formats: Sequence[str] = ("json", "csv")) -> list[Path]:
    """Write report.json and <name>.csv tables; returns the written paths."""
    directory = Path(directory)
    written = []
    report_path = directory / OUTPUT.report_name
    write_atomic(report_path, encode_json(bundle.report) + "\n")
    written.append(report_path)
    if "csv" in formats:
        for name in sorted(bundle.tables):
            path = directory / f"{name}.csv"
            write_atomic(path, encode_csv(bundle.tables[name]))
            written.append(path)
    logger.info("Results written to %s (%d files)", directory, len(written))
    return written
