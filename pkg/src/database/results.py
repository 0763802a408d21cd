"""
Persist benchmark reports into the results database.
"""
import json
import logging
import sqlite3
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config.settings import RESULTS_DB
from src.bench.benchmark import BenchReport
from src.database.schema import init_database

logger = logging.getLogger(__name__)


def store_report(report: BenchReport, db_path: Union[str, Path] = RESULTS_DB,
                 config: Optional[str] = None, policies: Sequence[str] = (),
                 seeds: Sequence[int] = ()) -> int:
    """
    Store a benchmark report: one benchmark_runs row, its episodes, and the bounds.

    Bounds are upserted, so the table keeps the latest value per instance.

    Returns:
        id of the new benchmark_runs row
    """
    init_database(db_path)
    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()
    try:
        cursor.execute("""
            INSERT INTO benchmark_runs (config, policies, seeds, report_json)
            VALUES (?, ?, ?, ?)
        """, (config, ",".join(policies), ",".join(str(s) for s in seeds),
              json.dumps(report.to_dict(), sort_keys=True)))
        run_id = cursor.lastrowid

        for run in report.runs:
            cursor.execute("""
                INSERT INTO episodes (run_id, instance, policy, seed, makespan, ratio,
                                      total_energy, mean_lead_time, machine_utilization, wall_time)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (run_id, run.instance, run.policy, run.seed, run.makespan, run.ratio,
                  run.objectives.get("total_energy"), run.objectives.get("mean_lead_time"),
                  run.objectives.get("machine_utilization"), run.wall_time))

        for instance, bound in report.bounds.items():
            cursor.execute("""
                INSERT INTO instance_bounds (instance, lower_bound, source)
                VALUES (?, ?, ?)
                ON CONFLICT(instance) DO UPDATE SET
                    lower_bound = excluded.lower_bound,
                    source = excluded.source,
                    updated_at = CURRENT_TIMESTAMP
            """, (instance, bound["lower_bound"], bound["source"]))

        conn.commit()
    finally:
        conn.close()

    logger.info(f"✓ Stored {len(report.runs)} episodes as benchmark run {run_id}")
    return run_id


def load_episodes(db_path: Union[str, Path] = RESULTS_DB, run_id: Optional[int] = None) -> List[Dict]:
    """Episode rows as dicts, optionally restricted to one benchmark run."""
    conn = sqlite3.connect(db_path)
    conn.row_factory = sqlite3.Row
    try:
        query = "SELECT * FROM episodes"
        params: Tuple = ()
        if run_id is not None:
            query += " WHERE run_id = ?"
            params = (run_id,)
        query += " ORDER BY run_id, instance, policy, seed"
        return [dict(row) for row in conn.execute(query, params).fetchall()]
    finally:
        conn.close()
