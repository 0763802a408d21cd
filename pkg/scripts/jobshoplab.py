#!/usr/bin/env python3
"""
JobShopLab command line.

Usage:
    python scripts/jobshoplab.py run --instance data/instances/d2.jsl --policy spt --trace-out d2.json
    python scripts/jobshoplab.py bench --instances data/instances --policies spt,mwkr,random \\
        --seeds 0..2 --bounds data/instances/bounds.txt --report report.json
    python scripts/jobshoplab.py validate --instance data/instances/d2.jsl --trace d2.json
    python scripts/jobshoplab.py solve-exact --instance data/instances/d2.jsl
    python scripts/jobshoplab.py gantt --trace d2.json --out d2_gantt.json

Exit codes: 0 ok, 1 usage/config/instance error, 2 trace violations,
3 infeasible episode or exact-solver size guard.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent))
from config.settings import BENCH_WORKERS, LOG_LEVEL, RESULTS_DB
from src.bench import (
    brute_force_optimal, load_bounds, parse_seeds, run_benchmark, validate_trace, witness_trace, write_gantt,
)
from src.dispatch import make_policy, run_episode
from src.exceptions import (
    ConfigError, InstanceError, JobShopLabError, NotClassicalError, SimulationError, SizeGuardError,
    TraceValidationError,
)
from src.instance import load_instance, load_instance_dir
from src.middleware import EnvConfig, load_config
from src.simulation.trace import trace_from_json, trace_to_json

logger = logging.getLogger("jobshoplab")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other input problem."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"✗ {self.prog}: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def banner(title: str):
    print(f"\n{'=' * 80}")
    print(title)
    print(f"{'=' * 80}\n")


def _config(path: Optional[str]) -> EnvConfig:
    return load_config(path) if path else EnvConfig()


def cmd_run(args) -> int:
    inst = load_instance(args.instance, args.format)
    cfg = _config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    banner(f"Run: {inst.name} / {args.policy} / seed {seed}")

    trace, objectives = run_episode(inst, cfg, make_policy(args.policy, seed), seed=seed)
    violations = validate_trace(inst, trace)
    print(f"Makespan:            {objectives.makespan}")
    for name, value in objectives.to_dict().items():
        if name != "makespan":
            print(f"{name + ':':<32} {value:g}")
    if args.trace_out:
        trace_to_json(trace, args.trace_out)
        print(f"\n✓ Trace written to {args.trace_out}")
    if violations:
        for v in violations:
            print(f"  ✗ {v}")
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_bench(args) -> int:
    instances = load_instance_dir(args.instances)
    if not instances:
        raise InstanceError(f"no .jsl or .orlib files in {args.instances}")
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    seeds = parse_seeds(args.seeds)
    bounds = load_bounds(args.bounds) if args.bounds else {}
    cfg = _config(args.config)

    banner(f"Benchmark: {len(instances)} instance(s) x {len(policies)} policies x {len(seeds)} seed(s)")
    try:
        report = run_benchmark(instances, policies, cfg, seeds, bounds=bounds, workers=args.workers)
    except TraceValidationError as e:
        print(f"✗ {e}")
        for v in e.violations:
            print(f"  {v}")
        if args.traces_dir and e.trace is not None:
            Path(args.traces_dir).mkdir(parents=True, exist_ok=True)
            path = Path(args.traces_dir) / "offending_trace.json"
            trace_to_json(e.trace, path)
            print(f"\nOffending trace written to {path}")
        return EXIT_VIOLATIONS

    report.write(args.report, timings=args.timings)
    if args.traces_dir:
        out = Path(args.traces_dir)
        out.mkdir(parents=True, exist_ok=True)
        for (name, policy, seed), trace in sorted(report.traces.items()):
            trace_to_json(trace, out / f"{name}_{policy}_{seed}.json")
    if args.db:
        from src.database.results import store_report

        store_report(report, args.db, config=args.config, policies=policies, seeds=seeds)

    print(f"{'Instance':<12} {'Policy':<8} {'Mean':>10} {'Std':>8} {'LB/C':>7}")
    print("-" * 49)
    for row in report.aggregates:
        std = f"{row['std']:.2f}" if row["std"] is not None else "-"
        ratio = f"{row['ratio']:.3f}" if row["ratio"] is not None else "-"
        print(f"{row['instance']:<12} {row['policy']:<8} {row['mean']:>10.2f} {std:>8} {ratio:>7}")
    if args.timings:
        total = sum(r.wall_time for r in report.runs)
        print(f"\nEpisode wall time: {total:.2f}s over {len(report.runs)} runs")
    if report.failures:
        print(f"\n⚠ {len(report.failures)} episode(s) failed:")
        for failure in report.failures:
            print(f"  ✗ {failure['instance']}/{failure['policy']}/seed {failure['seed']}: {failure['reason']}")
        print(f"\nReport written to {args.report}")
        return EXIT_INFEASIBLE
    print(f"\n✓ Report written to {args.report}")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.instance, args.format)
    trace = trace_from_json(Path(args.trace))
    violations = validate_trace(inst, trace)
    banner(f"Validate: {trace.instance} ({len(trace.records)} records)")
    if not violations:
        print("✓ No violations")
        return EXIT_OK
    for v in violations:
        print(f"  ✗ {v}")
    print(f"\n{len(violations)} violation(s)")
    return EXIT_VIOLATIONS


def cmd_solve_exact(args) -> int:
    inst = load_instance(args.instance, args.format)
    banner(f"Exact solve: {inst.name} ({inst.op_count} operations)")
    result = brute_force_optimal(inst, force=args.force)
    print(f"Optimal makespan: {result.makespan}")
    print(f"Nodes explored:   {result.nodes}")
    if args.witness_out:
        trace = witness_trace(inst, result.starts)
        trace_to_json(trace, args.witness_out)
        print(f"✓ Witness trace written to {args.witness_out}")
    return EXIT_OK


def cmd_gantt(args) -> int:
    trace = trace_from_json(Path(args.trace))
    document = write_gantt(trace, args.out)
    print(f"✓ Gantt for {trace.instance}: {len(document['resources'])} resources, "
          f"makespan {document['makespan']} -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jobshoplab", description="Job shop simulation and benchmarking")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="Run one episode with a dispatching rule")
    run.add_argument("--instance", required=True)
    run.add_argument("--format", choices=("dsl", "orlib"))
    run.add_argument("--policy", default="spt", help="spt, mwkr or random")
    run.add_argument("--config", help="Configuration DSL file")
    run.add_argument("--seed", type=int)
    run.add_argument("--trace-out", help="Write the trace as JSON")
    run.set_defaults(handler=cmd_run)

    bench = sub.add_parser("bench", help="Benchmark policies over a directory of instances")
    bench.add_argument("--instances", required=True, help="Directory with .jsl/.orlib files")
    bench.add_argument("--policies", default="spt,mwkr,random")
    bench.add_argument("--config", help="Configuration DSL file")
    bench.add_argument("--seeds", default="0", help="a..b, a,b,c or a single seed")
    bench.add_argument("--bounds", help="Lower bounds file ('<instance> <LB>' lines)")
    bench.add_argument("--report", required=True, help="JSON report path")
    bench.add_argument("--workers", type=int, default=BENCH_WORKERS)
    bench.add_argument("--timings", action="store_true", help="Include wall times in the report")
    bench.add_argument("--traces-dir", help="Write every episode trace here")
    bench.add_argument("--db", nargs="?", const=str(RESULTS_DB), help="Store results in SQLite")
    bench.set_defaults(handler=cmd_bench)

    validate = sub.add_parser("validate", help="Check a trace against its instance")
    validate.add_argument("--instance", required=True)
    validate.add_argument("--format", choices=("dsl", "orlib"))
    validate.add_argument("--trace", required=True)
    validate.set_defaults(handler=cmd_validate)

    exact = sub.add_parser("solve-exact", help="Optimal makespan of a small classical instance")
    exact.add_argument("--instance", required=True)
    exact.add_argument("--format", choices=("dsl", "orlib"))
    exact.add_argument("--force", action="store_true", help="Ignore the size guard")
    exact.add_argument("--witness-out", help="Write the optimal schedule as a trace")
    exact.set_defaults(handler=cmd_solve_exact)

    gantt = sub.add_parser("gantt", help="Export a trace as Gantt JSON")
    gantt.add_argument("--trace", required=True)
    gantt.add_argument("--out", required=True)
    gantt.set_defaults(handler=cmd_gantt)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else LOG_LEVEL,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (SizeGuardError, SimulationError) as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InstanceError, ConfigError, NotClassicalError, OSError, ValueError) as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_USAGE
    except JobShopLabError as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
