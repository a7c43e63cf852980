"""
database.py — SQLite archive of simulation runs
A run is stored whole (its JSON report) plus one row per thinning factor,
so past runs can be listed, reloaded and queried.
"""

import json
import os
import sqlite3
from contextlib import closing
from datetime import datetime

import config
from simulator import SimulationReport


def get_conn(db_file: str | None = None):
    path = db_file or config.DB_FILE
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    conn = sqlite3.connect(path, timeout=30)
    conn.row_factory = sqlite3.Row
    conn.execute("PRAGMA journal_mode=WAL")
    conn.execute("PRAGMA synchronous=NORMAL")
    return conn


def init_db(db_file: str | None = None):
    with closing(get_conn(db_file)) as conn, conn:
        conn.executescript("""
        CREATE TABLE IF NOT EXISTS sim_runs (
            id           INTEGER PRIMARY KEY AUTOINCREMENT,
            created_at   TEXT,
            rho          REAL,
            theta        REAL,
            budget       REAL,
            replications INTEGER,
            seed         INTEGER,
            n_flagged    INTEGER,
            report_json  TEXT
        );

        CREATE TABLE IF NOT EXISTS sim_records (
            run_id      INTEGER REFERENCES sim_runs(id),
            k           INTEGER,
            n_k         INTEGER,
            var_hat     REAL,
            se          REAL,
            eff_emp     REAL,
            eff_se      REAL,
            eff_pred    REAL,
            eff_asym    REAL,
            flag        INTEGER,
            PRIMARY KEY (run_id, k)
        );
        """)


# ── Write ──────────────────────────────────────────────────────────

def save_simulation(report: SimulationReport, db_file: str | None = None) -> int:
    """Archive a run; returns its id."""
    init_db(db_file)
    cfg = report.config
    with closing(get_conn(db_file)) as conn, conn:
        cur = conn.execute("""
            INSERT INTO sim_runs
              (created_at,rho,theta,budget,replications,seed,n_flagged,report_json)
            VALUES (?,?,?,?,?,?,?,?)
        """, (datetime.now().isoformat(timespec="seconds"),
              cfg.rho, cfg.theta, cfg.budget.B, cfg.replications, cfg.seed,
              len(report.flagged), report.to_json()))
        run_id = cur.lastrowid
        conn.executemany("""
            INSERT INTO sim_records
              (run_id,k,n_k,var_hat,se,eff_emp,eff_se,eff_pred,eff_asym,flag)
            VALUES (?,?,?,?,?,?,?,?,?,?)
        """, [(run_id, r.k, r.n_k, r.var_hat, r.se, r.eff_emp, r.eff_se,
               r.eff_pred, r.eff_asym, int(r.flag)) for r in report.records])
    return run_id


# ── Read ───────────────────────────────────────────────────────────

def list_simulations(n: int = 20, db_file: str | None = None) -> list:
    """Most recent runs first, without their full reports."""
    init_db(db_file)
    with closing(get_conn(db_file)) as conn, conn:
        return [dict(r) for r in conn.execute("""
            SELECT id,created_at,rho,theta,budget,replications,seed,n_flagged
            FROM sim_runs ORDER BY id DESC LIMIT ?
        """, (n,)).fetchall()]


def get_simulation(run_id: int, db_file: str | None = None) -> SimulationReport | None:
    init_db(db_file)
    with closing(get_conn(db_file)) as conn, conn:
        row = conn.execute("SELECT report_json FROM sim_runs WHERE id=?",
                           (run_id,)).fetchone()
    return SimulationReport.from_dict(json.loads(row["report_json"])) if row else None


def get_records(run_id: int, db_file: str | None = None) -> list:
    init_db(db_file)
    with closing(get_conn(db_file)) as conn, conn:
        return [dict(r) for r in conn.execute(
            "SELECT * FROM sim_records WHERE run_id=? ORDER BY k", (run_id,)).fetchall()]
