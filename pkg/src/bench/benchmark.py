"""
Benchmark runner.

Runs every (instance, policy, seed) episode on a thread pool, validates every
trace, and reports lower-bound ratios LB / Cmax and pairwise relative
improvements 1 - C_A / C_B. Results are keyed and sorted after collection, so
the report does not depend on completion order. Episodes that deadlock or run
out of steps are listed under `failures` and do not stop the other cells.
"""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from config.settings import BENCH_WORKERS, EXACT_OP_LIMIT
from src.bench.exact import brute_force_optimal
from src.bench.validator import validate_trace
from src.dispatch.rules import make_policy
from src.dispatch.runner import run_episode
from src.exceptions import ConfigError, DeadlockError, StepBudgetExceeded, TraceValidationError
from src.instance.classification import is_classical
from src.instance.model import Instance
from src.middleware.config_dsl import EnvConfig
from src.simulation.trace import Trace

logger = logging.getLogger(__name__)

BOUNDS_FILE_SOURCE = "bounds-file"
BRUTE_FORCE_SOURCE = "brute-force"
REJECTED_SOURCE = "rejected"

DEADLOCK = "deadlock"
STEP_BUDGET = "step-budget"


@dataclass(frozen=True)
class RunResult:
    instance: str
    policy: str
    seed: int
    makespan: int
    objectives: Dict[str, float]
    ratio: Optional[float]
    wall_time: float = 0.0


@dataclass
class BenchReport:
    runs: List[RunResult] = field(default_factory=list)
    bounds: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    aggregates: List[Dict[str, Any]] = field(default_factory=list)
    improvements: List[Dict[str, Any]] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    traces: Dict[Tuple[str, str, int], Trace] = field(default_factory=dict, repr=False)

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        runs = []
        for run in self.runs:
            entry = {
                "instance": run.instance,
                "policy": run.policy,
                "seed": run.seed,
                "makespan": run.makespan,
                "objectives": run.objectives,
                "ratio": run.ratio,
            }
            if timings:
                entry["wall_time"] = run.wall_time
            runs.append(entry)
        return {
            "runs": runs,
            "bounds": self.bounds,
            "aggregates": self.aggregates,
            "improvements": self.improvements,
            "failures": self.failures,
        }

    def write(self, path: Union[str, Path], timings: bool = False) -> str:
        text = json.dumps(self.to_dict(timings), indent=1, sort_keys=True)
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info(f"✓ Report with {len(self.runs)} runs written to {path}")
        return text


def parse_seeds(text: str) -> List[int]:
    """'a..b' (inclusive), 'a,b,c' or a single integer."""
    text = text.strip()
    try:
        if ".." in text:
            low, high = (int(v) for v in text.split("..", 1))
            if high < low:
                raise ConfigError(f"empty seed range '{text}'")
            return list(range(low, high + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad seed list '{text}' (expected a..b or a,b,c)")


def load_bounds(path: Union[str, Path]) -> Dict[str, int]:
    """Read '<instance-name> <int-LB>' lines; '#' starts a comment."""
    bounds = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 2:
            raise ConfigError(f"{path}:{line_no}: expected '<instance> <lower-bound>'")
        try:
            bounds[body[0]] = int(body[1])
        except ValueError:
            raise ConfigError(f"{path}:{line_no}: lower bound '{body[1]}' is not an integer")
    return bounds


def resolve_bound(inst: Instance, bounds: Mapping[str, int]) -> Tuple[Optional[int], str]:
    if inst.name in bounds:
        return bounds[inst.name], BOUNDS_FILE_SOURCE
    if is_classical(inst) and inst.op_count <= EXACT_OP_LIMIT:
        return brute_force_optimal(inst).makespan, BRUTE_FORCE_SOURCE
    return None, "absent"


def _reject_bound_above(report: BenchReport, name: str, makespan: int):
    """A lower bound above an achieved makespan is wrong; drop it so no ratio exceeds 1."""
    entry = report.bounds[name]
    if entry["lower_bound"] is None or entry["lower_bound"] <= makespan:
        return
    logger.warning(f"⚠ {name}: lower bound {entry['lower_bound']} ({entry['source']}) exceeds "
                   f"achieved makespan {makespan}, bound ignored")
    report.bounds[name] = {"lower_bound": None, "source": REJECTED_SOURCE}


def _run_one(inst: Instance, policy_name: str, seed: int, cfg: EnvConfig):
    started = time.perf_counter()
    trace, objectives = run_episode(inst, cfg, make_policy(policy_name, seed), seed=seed)
    elapsed = time.perf_counter() - started
    violations = validate_trace(inst, trace)
    if violations:
        raise TraceValidationError(violations, trace=trace, label=f"{inst.name}/{policy_name}/seed {seed}")
    return trace, objectives, elapsed


def _aggregate(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    grouped = frame.groupby(["instance", "policy"], sort=True)["makespan"]
    table = grouped.agg(["mean", "std", "min", "max", "count"]).reset_index()
    rows = []
    for row in table.to_dict("records"):
        rows.append({
            "instance": row["instance"],
            "policy": row["policy"],
            "mean": float(row["mean"]),
            "std": None if pd.isna(row["std"]) else float(row["std"]),
            "min": int(row["min"]),
            "max": int(row["max"]),
            "runs": int(row["count"]),
        })
    return rows


def _improvements(aggregates: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    by_instance: Dict[str, Dict[str, float]] = {}
    for row in aggregates:
        by_instance.setdefault(row["instance"], {})[row["policy"]] = row["mean"]
    rows = []
    for instance in sorted(by_instance):
        means = by_instance[instance]
        for a in sorted(means):
            for b in sorted(means):
                rows.append({
                    "instance": instance,
                    "policy": a,
                    "baseline": b,
                    "improvement": 1.0 - means[a] / means[b],
                })
    return rows


def run_benchmark(instances: Sequence[Instance], policies: Sequence[str], cfg: EnvConfig,
                  seeds: Sequence[int], bounds: Optional[Mapping[str, int]] = None,
                  workers: Optional[int] = None) -> BenchReport:
    """
    Run and validate every (instance, policy, seed) episode.

    Args:
        instances: Parsed instances (names must be unique)
        policies: Policy names (spt, mwkr, random)
        cfg: Environment configuration shared by all runs
        seeds: Episode seeds
        bounds: Known lower bounds by instance name
        workers: Thread pool size (defaults to BENCH_WORKERS)

    Returns:
        BenchReport with runs sorted by (instance, policy, seed); deadlocked
        or over-budget episodes are listed in `failures` instead

    Raises:
        TraceValidationError: a trace failed validation (the trace is attached)
    """
    bounds = dict(bounds or {})
    for name in policies:
        make_policy(name)
    by_name = {inst.name: inst for inst in instances}
    if len(by_name) != len(instances):
        raise ConfigError("instance names must be unique within a benchmark")

    report = BenchReport()
    for inst in instances:
        value, source = resolve_bound(inst, bounds)
        report.bounds[inst.name] = {"lower_bound": value, "source": source}

    tasks = [(inst.name, policy, seed) for inst in instances for policy in policies for seed in seeds]
    logger.info(f"Benchmark: {len(instances)} instance(s) x {len(policies)} policies x {len(seeds)} seed(s)")

    results = {}
    failed = {}
    with ThreadPoolExecutor(max_workers=workers or BENCH_WORKERS) as executor:
        futures = {
            executor.submit(_run_one, by_name[name], policy, seed, cfg): (name, policy, seed)
            for name, policy, seed in tasks
        }
        for i, future in enumerate(as_completed(futures), start=1):
            key = futures[future]
            try:
                results[key] = future.result()
            except DeadlockError as e:
                failed[key] = (DEADLOCK, str(e))
                logger.warning(f"✗ {'/'.join(map(str, key))}: {e}")
            except StepBudgetExceeded as e:
                failed[key] = (STEP_BUDGET, str(e))
                logger.warning(f"✗ {'/'.join(map(str, key))}: {e}")
            if i % 25 == 0 or i == len(tasks):
                logger.info(f"  [{i}/{len(tasks)}] runs done")

    for name, policy, seed in sorted(failed):
        reason, details = failed[(name, policy, seed)]
        report.failures.append({"instance": name, "policy": policy, "seed": seed,
                                "reason": reason, "details": details})

    best: Dict[str, int] = {}
    for (name, _, _), (_, objectives, _) in results.items():
        best[name] = min(best.get(name, objectives.makespan), objectives.makespan)
    for name, makespan in sorted(best.items()):
        _reject_bound_above(report, name, makespan)

    for key in sorted(results):
        name, policy, seed = key
        trace, objectives, elapsed = results[key]
        lower_bound = report.bounds[name]["lower_bound"]
        ratio = lower_bound / objectives.makespan if lower_bound is not None and objectives.makespan else None
        report.runs.append(RunResult(
            instance=name, policy=policy, seed=seed, makespan=objectives.makespan,
            objectives=objectives.to_dict(), ratio=ratio, wall_time=elapsed,
        ))
        report.traces[key] = trace

    if report.runs:
        frame = pd.DataFrame([{"instance": r.instance, "policy": r.policy, "makespan": r.makespan}
                              for r in report.runs])
        report.aggregates = _aggregate(frame)
        for row in report.aggregates:
            lower_bound = report.bounds[row["instance"]]["lower_bound"]
            row["ratio"] = lower_bound / row["mean"] if lower_bound is not None else None
        report.improvements = _improvements(report.aggregates)
    if report.failures:
        logger.warning(f"⚠ Benchmark finished: {len(report.runs)} validated runs, "
                       f"{len(report.failures)} failed")
    else:
        logger.info(f"✓ Benchmark finished: {len(report.runs)} validated runs")
    return report
