import json

import pytest

from src.bench.gantt import export_gantt, write_gantt
from src.dispatch import make_policy, run_episode
from src.instance.generator import extend_instance, random_instance
from src.middleware import EnvConfig, PluginSpec
from src.simulation.trace import Trace


def machine_rows(document):
    return {row["id"]: row["intervals"] for row in document["resources"]}


def test_empty_trace():
    document = export_gantt(Trace("nothing", ()))
    assert document == {"instance": "nothing", "makespan": 0, "resources": []}


def test_single_operation(single_op):
    trace, _ = run_episode(single_op, EnvConfig(), make_policy("spt"))
    document = export_gantt(trace)
    assert document["makespan"] == 5
    assert machine_rows(document) == {
        "m1": [{"job": "J1", "op": 0, "start": 0, "end": 5, "kind": "working"}],
    }


def test_setup_interval_precedes_work(single_op):
    inst = extend_instance(single_op, setup=2)
    trace, _ = run_episode(inst, EnvConfig(plugins=(PluginSpec("setup_times"),)), make_policy("spt"))
    rows = machine_rows(export_gantt(trace))
    assert [(i["kind"], i["start"], i["end"]) for i in rows["m1"]] == [("setup", 0, 2), ("working", 2, 7)]


def test_d2_rows(d2):
    trace, _ = run_episode(d2, EnvConfig(), make_policy("spt"))
    rows = machine_rows(export_gantt(trace))
    assert [(i["job"], i["op"], i["start"], i["end"]) for i in rows["m1"]] == [("J1", 0, 0, 3), ("J2", 1, 3, 7)]
    assert [(i["job"], i["op"], i["start"], i["end"]) for i in rows["m2"]] == [("J2", 0, 0, 2), ("J1", 1, 3, 5)]


@pytest.mark.parametrize("seed", range(6))
def test_intervals_are_disjoint_and_match_busy_time(seed):
    inst = extend_instance(random_instance(3, 3, seed=seed), transports=2, travel=2, load_time=1,
                           unload_time=1, outage=(12, 3))
    cfg = EnvConfig(plugins=(PluginSpec("breakdowns"),), seed=seed)
    trace, _ = run_episode(inst, cfg, make_policy("random", seed))
    document = export_gantt(trace)
    for row in document["resources"]:
        intervals = row["intervals"]
        assert all(i["end"] > i["start"] for i in intervals)
        for a, b in zip(intervals, intervals[1:]):
            assert a["end"] <= b["start"], f"{row['id']}: {a} overlaps {b}"
    rows = machine_rows(document)
    for machine, totals in trace.summary["machines"].items():
        working = sum(i["end"] - i["start"] for i in rows.get(machine, []) if i["kind"] == "working")
        assert working == totals["busy"]


def test_write_gantt(d2, tmp_path):
    trace, _ = run_episode(d2, EnvConfig(), make_policy("mwkr"))
    path = tmp_path / "gantt.json"
    document = write_gantt(trace, path)
    assert json.loads(path.read_text()) == document
    assert document["makespan"] == 7
