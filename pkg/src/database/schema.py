"""
Database schema initialization for JobShopLab benchmark results
"""
import logging
import sqlite3
from pathlib import Path
from typing import Union

from config.settings import RESULTS_DB

logger = logging.getLogger(__name__)


def init_database(db_path: Union[str, Path] = RESULTS_DB) -> Path:
    """
    Create the results tables and indexes.
    Safe to run multiple times - won't drop existing data.

    Args:
        db_path: SQLite file to create or open

    Returns:
        Path of the database file
    """
    db_path = Path(db_path)
    db_path.parent.mkdir(parents=True, exist_ok=True)
    logger.info(f"Initializing results database at: {db_path}")

    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()

    # One row per bench invocation
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS benchmark_runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            config TEXT,
            policies TEXT NOT NULL,
            seeds TEXT NOT NULL,
            report_json TEXT NOT NULL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    """)

    # One row per (instance, policy, seed) episode
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS episodes (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id INTEGER NOT NULL,
            instance TEXT NOT NULL,
            policy TEXT NOT NULL,
            seed INTEGER NOT NULL,
            makespan INTEGER NOT NULL,
            ratio REAL,
            total_energy REAL,
            mean_lead_time REAL,
            machine_utilization REAL,
            wall_time REAL,
            FOREIGN KEY (run_id) REFERENCES benchmark_runs(id),
            UNIQUE(run_id, instance, policy, seed)
        )
    """)

    # Lower bounds and where they came from
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS instance_bounds (
            instance TEXT PRIMARY KEY,
            lower_bound INTEGER,
            source TEXT NOT NULL,
            updated_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    """)

    cursor.execute("CREATE INDEX IF NOT EXISTS idx_episodes_run ON episodes(run_id)")
    cursor.execute("CREATE INDEX IF NOT EXISTS idx_episodes_instance_policy ON episodes(instance, policy)")

    conn.commit()
    conn.close()

    logger.info(f"✓ Results database ready: {db_path}")
    return db_path
