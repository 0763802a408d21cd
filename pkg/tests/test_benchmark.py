import json

import pytest

from src.bench import benchmark
from src.bench.benchmark import (
    BOUNDS_FILE_SOURCE, BRUTE_FORCE_SOURCE, DEADLOCK, REJECTED_SOURCE, load_bounds, parse_seeds, resolve_bound,
    run_benchmark,
)
from src.bench.validator import Violation
from src.exceptions import ConfigError, TraceValidationError
from src.instance import load_instance
from src.instance.generator import extend_instance
from src.middleware import EnvConfig


def test_d2_reaches_the_optimum(d2):
    report = run_benchmark([d2], ["spt", "mwkr"], EnvConfig(), [0])
    assert report.bounds == {"d2": {"lower_bound": 7, "source": BRUTE_FORCE_SOURCE}}
    assert [(r.policy, r.makespan, r.ratio) for r in report.runs] == [("mwkr", 7, 1.0), ("spt", 7, 1.0)]
    assert all(row["ratio"] == 1.0 for row in report.aggregates)


def test_identical_seeds_have_zero_spread(d2):
    report = run_benchmark([d2], ["spt"], EnvConfig(), [0, 1, 2])
    (row,) = report.aggregates
    assert row == {"instance": "d2", "policy": "spt", "mean": 7.0, "std": 0.0, "min": 7, "max": 7,
                   "runs": 3, "ratio": 1.0}


def test_single_seed_has_no_spread(d2):
    report = run_benchmark([d2], ["random"], EnvConfig(), [4])
    assert report.aggregates[0]["std"] is None


def test_improvements_cover_every_pair(d2):
    report = run_benchmark([d2], ["spt", "mwkr", "random"], EnvConfig(), [0, 1])
    pairs = {(row["policy"], row["baseline"]): row["improvement"] for row in report.improvements}
    assert len(pairs) == 9
    assert pairs[("spt", "spt")] == 0.0
    assert pairs[("spt", "mwkr")] == 0.0


def test_report_does_not_depend_on_worker_count(instances_dir, tmp_path):
    instances = [load_instance(instances_dir / "d2.jsl"), load_instance(instances_dir / "ft06.orlib")]
    bounds = load_bounds(instances_dir / "bounds.txt")
    texts = []
    for workers in (1, 4):
        report = run_benchmark(instances, ["spt", "random"], EnvConfig(), [0, 1], bounds=bounds, workers=workers)
        path = tmp_path / f"report_{workers}.json"
        report.write(path)
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]
    document = json.loads(texts[0])
    assert document["bounds"]["ft06"] == {"lower_bound": 55, "source": BOUNDS_FILE_SOURCE}
    assert all(0 < run["ratio"] <= 1 for run in document["runs"])
    assert "wall_time" not in document["runs"][0]


def test_timings_are_opt_in(d2, tmp_path):
    report = run_benchmark([d2], ["spt"], EnvConfig(), [0])
    path = tmp_path / "report.json"
    report.write(path, timings=True)
    assert "wall_time" in json.loads(path.read_text())["runs"][0]


def test_resolve_bound(d2):
    assert resolve_bound(d2, {"d2": 6}) == (6, BOUNDS_FILE_SOURCE)
    assert resolve_bound(d2, {}) == (7, BRUTE_FORCE_SOURCE)
    assert resolve_bound(extend_instance(d2, transports=1), {}) == (None, "absent")


def test_failed_validation_carries_the_trace(d2, monkeypatch):
    monkeypatch.setattr(benchmark, "validate_trace", lambda inst, trace: [Violation("overlap", "forced", 0)])
    with pytest.raises(TraceValidationError) as exc:
        run_benchmark([d2], ["spt"], EnvConfig(), [0], workers=1)
    assert exc.value.trace is not None
    assert exc.value.label == "d2/spt/seed 0"


def test_bad_inputs(d2):
    with pytest.raises(ConfigError):
        run_benchmark([d2], ["fifo"], EnvConfig(), [0])
    with pytest.raises(ConfigError):
        run_benchmark([d2, d2], ["spt"], EnvConfig(), [0])


@pytest.mark.parametrize("text, seeds", [("0..3", [0, 1, 2, 3]), ("5", [5]), ("1,4,9", [1, 4, 9]), (" 2..2 ", [2])])
def test_parse_seeds(text, seeds):
    assert parse_seeds(text) == seeds


@pytest.mark.parametrize("text", ["3..1", "a..b", "1,x"])
def test_parse_seeds_errors(text):
    with pytest.raises(ConfigError):
        parse_seeds(text)


def test_load_bounds(tmp_path):
    path = tmp_path / "bounds.txt"
    path.write_text("# known optima\nft06 55  # Fisher and Thompson\n\nla01 666\n")
    assert load_bounds(path) == {"ft06": 55, "la01": 666}
    path.write_text("ft06 55\nla01\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_bounds(path)
    path.write_text("ft06 fifty\n")
    with pytest.raises(ConfigError):
        load_bounds(path)


def test_deadlocked_cells_are_reported_not_raised(blocking, d2):
    # at t=1 each post-buffer holds a job whose next pre-buffer is full
    report = run_benchmark([blocking, d2], ["spt", "random"], EnvConfig(), [0, 1], workers=2)
    assert [(f["instance"], f["policy"], f["seed"], f["reason"]) for f in report.failures] == [
        ("blocking", "random", 0, DEADLOCK), ("blocking", "random", 1, DEADLOCK),
        ("blocking", "spt", 0, DEADLOCK), ("blocking", "spt", 1, DEADLOCK),
    ]
    assert "t=1" in report.failures[0]["details"]
    assert {r.instance for r in report.runs} == {"d2"}
    assert len(report.runs) == 4
    assert {row["instance"] for row in report.aggregates} == {"d2"}
    assert report.to_dict()["failures"] == report.failures


def test_lower_bound_above_makespan_is_rejected(d2, caplog):
    report = run_benchmark([d2], ["spt"], EnvConfig(), [0], bounds={"d2": 9})
    assert report.bounds["d2"] == {"lower_bound": None, "source": REJECTED_SOURCE}
    assert report.runs[0].ratio is None
    assert report.aggregates[0]["ratio"] is None
    assert "exceeds achieved makespan 7" in caplog.text

    report = run_benchmark([d2], ["spt"], EnvConfig(), [0], bounds={"d2": 7})
    assert report.bounds["d2"] == {"lower_bound": 7, "source": BOUNDS_FILE_SOURCE}
    assert report.runs[0].ratio == 1.0
