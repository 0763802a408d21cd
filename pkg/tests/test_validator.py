from dataclasses import replace

import pytest

from src.bench.validator import CAPACITY, ORDERING, OVERLAP, PRECEDENCE, TELEPORT, validate_trace
from src.dispatch import make_policy, run_episode
from src.instance import load_instance, parse_instance_dsl
from src.instance.generator import extend_instance, random_instance
from src.instance.model import SINK, SOURCE, UNIFORM
from src.middleware import EnvConfig, PluginSpec
from src.simulation.state import TraceRecord
from src.simulation.trace import Trace, trace_from_json, trace_to_json

ONE_MACHINE = "machine m1 pre 1\njob A\n  op m1 3\njob B\n  op m1 2\n"


class Recorder:
    """Builds hand-written traces, one round per record."""

    def __init__(self):
        self.records = []

    def add(self, t, kind, resource, job=None, actor=None, priority=50.0):
        self.records.append(TraceRecord(t, kind, resource, job, priority, "auto", len(self.records), actor))
        return self

    def move(self, t, source, target, job):
        return self.add(t, "BufferGet", source, job).add(t, "BufferPut", target, job)

    def process(self, start, end, machine, job):
        self.add(start, "BufferGet", f"{machine}.pre", job, actor=machine)
        self.add(start, "MachineStarted", machine, job)
        self.add(end, "MachineCompleted", machine, job)
        return self.add(end, "BufferPut", f"{machine}.post", job, actor=machine)

    def trace(self, name="hand"):
        return Trace(name, tuple(self.records))


def kinds(violations):
    return {v.kind for v in violations}


@pytest.fixture
def one_machine():
    return parse_instance_dsl(ONE_MACHINE)


def test_hand_written_feasible_trace(one_machine):
    rec = Recorder().move(0, SOURCE, "m1.pre", "A")
    rec.process(0, 3, "m1", "A").move(3, "m1.post", SINK, "A")
    rec.move(3, SOURCE, "m1.pre", "B")
    rec.process(3, 5, "m1", "B").move(5, "m1.post", SINK, "B")
    assert validate_trace(one_machine, rec.trace()) == []


def test_overlap_on_a_machine():
    inst = parse_instance_dsl("machine m1\njob A\n  op m1 3\njob B\n  op m1 2\n")
    rec = Recorder().move(0, SOURCE, "m1.pre", "A").move(0, SOURCE, "m1.pre", "B")
    rec.add(0, "BufferGet", "m1.pre", "A", actor="m1").add(0, "MachineStarted", "m1", "A")
    rec.add(1, "BufferGet", "m1.pre", "B", actor="m1").add(1, "MachineStarted", "m1", "B")
    assert OVERLAP in kinds(validate_trace(inst, rec.trace()))


def test_operations_out_of_order(d2):
    rec = Recorder().move(0, SOURCE, "m2.pre", "J1")
    rec.process(0, 2, "m2", "J1")
    violations = validate_trace(d2, rec.trace())
    assert PRECEDENCE in kinds(violations)
    assert TELEPORT in kinds(violations)


def test_buffer_capacity(one_machine):
    rec = Recorder().move(0, SOURCE, "m1.pre", "A").move(0, SOURCE, "m1.pre", "B")
    assert kinds(validate_trace(one_machine, rec.trace())) == {CAPACITY}


def test_unfinished_job_in_sink(one_machine):
    rec = Recorder().move(0, SOURCE, SINK, "A")
    assert TELEPORT in kinds(validate_trace(one_machine, rec.trace()))


def test_job_that_never_arrives(one_machine):
    rec = Recorder().add(0, "BufferGet", SOURCE, "A")
    violations = validate_trace(one_machine, rec.trace())
    assert [v.kind for v in violations] == [TELEPORT]
    assert "never arrived" in violations[0].details


def test_time_going_backwards(one_machine):
    rec = Recorder().move(2, SOURCE, "m1.pre", "A").move(1, SOURCE, "m1.pre", "B")
    assert ORDERING in kinds(validate_trace(one_machine, rec.trace()))


def test_priority_inversion_within_a_round(d2):
    trace, _ = run_episode(d2, EnvConfig(), make_policy("spt"))
    first, second = trace.records[0], trace.records[1]
    assert first.round == second.round
    swapped = (replace(first, priority=10.0), replace(second, priority=90.0)) + trace.records[2:]
    assert ORDERING in kinds(validate_trace(d2, replace(trace, records=swapped)))


def test_breakdown_after_regular_event(one_machine):
    rec = Recorder().move(0, SOURCE, "m1.pre", "A")
    rec.add(0, "BreakdownStart", "m1", priority=100.0)
    assert ORDERING in kinds(validate_trace(one_machine, rec.trace()))


def test_json_round_trip_stays_feasible(d2, tmp_path):
    inst = extend_instance(d2, transports=1, travel=2, load_time=1)
    trace, _ = run_episode(inst, EnvConfig(), make_policy("mwkr"))
    path = tmp_path / "trace.json"
    trace_to_json(trace, path)
    assert validate_trace(inst, trace_from_json(path)) == []


EXTENSIONS = {
    "classical": ({}, ()),
    "transport": ({"transports": 2, "travel": 2}, ()),
    "loaded_transport": ({"transports": 1, "travel": 1, "transport_capacity": 2, "load_time": 1,
                          "unload_time": 1}, ()),
    "buffers": ({"buffer_capacity": 1}, ()),
    "fifo": ({"buffer_capacity": 2, "buffer_order": "fifo"}, ()),
    "setup": ({"setup": 2}, (PluginSpec("setup_times"),)),
    "breakdown": ({"outage": (10, 2)}, (PluginSpec("breakdowns"),)),
    "stochastic": ({"stochastic": (UNIFORM, (0.5, 1.5))}, (PluginSpec("stochastic"),)),
}


@pytest.mark.parametrize("extension", sorted(EXTENSIONS))
@pytest.mark.parametrize("seed", range(3))
def test_simulated_traces_are_feasible(extension, seed):
    options, plugins = EXTENSIONS[extension]
    inst = extend_instance(random_instance(3, 3, seed=seed), **options)
    cfg = EnvConfig(plugins=plugins, seed=seed)
    for name in ("spt", "mwkr", "random"):
        trace, _ = run_episode(inst, cfg, make_policy(name, seed))
        assert validate_trace(inst, trace) == [], f"{extension}/{name}/seed {seed}"


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_every_extension_at_once(seed):
    inst = extend_instance(random_instance(4, 3, seed=seed), transports=2, travel=2, transport_capacity=2,
                           load_time=1, unload_time=1, buffer_capacity=1, setup=1, outage=(15, 3),
                           stochastic=(UNIFORM, (0.5, 1.5)))
    cfg = EnvConfig(plugins=(PluginSpec("stochastic"), PluginSpec("setup_times"), PluginSpec("breakdowns"),
                             PluginSpec("consumption", (("working", "1"),))), seed=seed)
    trace, objectives = run_episode(inst, cfg, make_policy("random", seed))
    assert validate_trace(inst, trace) == []
    assert objectives.makespan > 0


@pytest.mark.parametrize("seed", range(40))
def test_capacity_one_cell_never_overflows(seed):
    inst = extend_instance(random_instance(4, 3, seed=seed), transports=1, travel=1, buffer_capacity=1)
    trace, _ = run_episode(inst, EnvConfig(seed=seed), make_policy("random", seed))
    violations = validate_trace(inst, trace)
    assert CAPACITY not in kinds(violations)
    assert violations == []


BENCHMARK_INSTANCES = [
    "d2.jsl",
    "ft06.orlib",
    *(pytest.param(f"la0{k}.orlib", marks=pytest.mark.slow) for k in range(1, 6)),
]


@pytest.mark.parametrize("extension", sorted(EXTENSIONS))
@pytest.mark.parametrize("filename", BENCHMARK_INSTANCES)
def test_benchmark_instances_are_feasible(instances_dir, filename, extension):
    options, plugins = EXTENSIONS[extension]
    inst = extend_instance(load_instance(instances_dir / filename), **options)
    cfg = EnvConfig(plugins=plugins, seed=1)
    for name in ("spt", "mwkr", "random"):
        trace, objectives = run_episode(inst, cfg, make_policy(name, 1))
        assert validate_trace(inst, trace) == [], f"{inst.name}/{extension}/{name}"
        assert objectives.makespan > 0
