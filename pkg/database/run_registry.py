import json
import sqlite3
import logging
from datetime import datetime, timezone

from .db import connect_db, create_runs_table

logger = logging.getLogger(__name__)


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def start_run(path, command, seed, config, output_path=None):
    """
    Record a run as 'running' before its command executes.

    Returns the new run_id.
    """
    create_runs_table(path)
    conn = connect_db(path)
    cursor = conn.cursor()
    cursor.execute(
        "INSERT INTO runs(command, seed, status, output_path, config_json, started_at) VALUES (?,?,?,?,?,?)",
        (command, str(seed), "running", output_path, json.dumps(config, sort_keys=True, default=str), _now()),
    )
    conn.commit()
    run_id = cursor.lastrowid
    conn.close()
    logger.debug("registered run %d (%s)", run_id, command)
    return run_id


def finish_run(path, run_id, status):
    """Mark a run 'ok' or 'failed'."""
    conn = connect_db(path)
    cursor = conn.cursor()
    cursor.execute("UPDATE runs SET status=?, finished_at=? WHERE run_id=?", (status, _now(), run_id))
    conn.commit()
    conn.close()


def list_runs(path, limit=20):
    """Most recent runs first, as dictionaries."""
    create_runs_table(path)
    conn = connect_db(path)
    conn.row_factory = sqlite3.Row
    cursor = conn.cursor()
    cursor.execute("SELECT * FROM runs ORDER BY run_id DESC LIMIT ?", (limit,))
    rows = [dict(row) for row in cursor.fetchall()]
    conn.close()
    return rows
