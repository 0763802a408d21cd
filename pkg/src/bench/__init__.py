from src.bench.benchmark import BenchReport, RunResult, load_bounds, parse_seeds, resolve_bound, run_benchmark
from src.bench.exact import ExactResult, brute_force_optimal, witness_trace
from src.bench.gantt import export_gantt, write_gantt
from src.bench.validator import Violation, validate_trace
