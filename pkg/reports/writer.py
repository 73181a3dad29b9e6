"""
Report Writer
JSON reports inside a common envelope, and CSV projections of their tables.
Files are written to a temporary name and moved into place, so a crashed
run never leaves a half-written report.
"""
import csv
import io
import json
import logging
import math
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from config import TOOL_NAME, TOOL_VERSION
from core.exponents import Exponent

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("json", "csv")


def jsonable(value):
    """Plain JSON values: numpy scalars and arrays unwrapped, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, Exponent):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Path):
        return str(value)
    return value


def envelope(command, config, seed, status, payload=None, error=None, started_at=None, elapsed=None):
    """
    Wrap a command's payload with tool version, config echo, seed, status and timing.

    The timing block is the only part that differs between identical runs.
    """
    report = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "status": status,
        "seed": seed,
        "config": config,
    }
    if payload:
        report.update(payload)
    if error is not None:
        report["error"] = error
    report["wall_clock"] = {
        "started_at": started_at or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "elapsed_seconds": elapsed,
    }
    return jsonable(report)


def _atomic_write(path, text):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def render_json(report):
    return json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n"


def render_csv(header, rows):
    """CSV text; floats in shortest round-trip form, missing values empty."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else jsonable(v) for v in row])
    return out.getvalue()


def write_report(path, report, fmt="json", table=None):
    """
    Write ``report`` as JSON, or its ``table`` (header, rows) as CSV.

    A failed report written in CSV format keeps a "status,failed" line so
    the file can never be mistaken for a finished table.
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}")
    if fmt == "json":
        text = render_json(report)
    elif report.get("status") != "ok" or table is None:
        text = render_csv(["status", "message"], [[report.get("status"), (report.get("error") or {}).get("message")]])
    else:
        text = render_csv(*table)
    written = _atomic_write(path, text)
    logger.info("wrote %s report %s", fmt, written)
    return written
