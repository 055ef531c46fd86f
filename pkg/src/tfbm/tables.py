"""Table output shared by the CLI and the validation suite.

Floats are written with ``repr``, the shortest string that round-trips the
64-bit value, so files are byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = ["format_table", "write_table"]


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def format_table(header: Sequence[str], rows, fmt: str = "csv") -> str:
    """Render ``rows`` under ``header`` as CSV or as JSON (``{"columns": ..., "rows": ...}``)."""
    rows = [list(r) for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(header))
        for r in rows:
            writer.writerow([_cell(x) for x in r])
        return buf.getvalue()
    if fmt == "json":
        def conv(x):
            if isinstance(x, (np.floating, float)):
                x = float(x)
                return x if np.isfinite(x) else repr(x)
            if isinstance(x, np.integer):
                return int(x)
            return x
        return json.dumps({"columns": list(header), "rows": [[conv(x) for x in r] for r in rows]}) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def write_table(path: str | Path, header: Sequence[str], rows, fmt: str = "csv") -> None:
    Path(path).write_text(format_table(header, rows, fmt))
