import sqlite3

from config import RUNS_DB


def connect_db(path=RUNS_DB):
    conn = sqlite3.connect(path)  # run registry file
    return conn


def create_runs_table(path=RUNS_DB):
    conn = connect_db(path)
    cursor = conn.cursor()
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS runs (
            run_id INTEGER PRIMARY KEY AUTOINCREMENT,
            command TEXT NOT NULL,
            seed TEXT NOT NULL,
            status TEXT NOT NULL,
            output_path TEXT,
            config_json TEXT NOT NULL,
            started_at TEXT NOT NULL,
            finished_at TEXT
        )
    """)
    conn.commit()
    conn.close()
