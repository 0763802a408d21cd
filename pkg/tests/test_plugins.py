from fractions import Fraction

import numpy as np
import pytest

from src.bench.validator import validate_trace
from src.dispatch import make_policy, run_episode
from src.exceptions import ConfigError
from src.instance import classical_reduction
from src.instance.generator import extend_instance, random_instance
from src.instance.model import GAMMA, TRANSPORT, UNIFORM
from src.middleware.config_dsl import EnvConfig, PluginSpec
from src.plugins import PLUGIN_ORDER, build_plugin, compose_plugins
from src.plugins.consumption import parse_rates, rate
from src.simulation import apply_agent_events, initial_state, settle_to_decision
from src.simulation.events import AGENT, Event, EventKind
from src.simulation.state import MACHINE_MODES
from src.simulation.streams import stream_generator

CONSUMPTION = PluginSpec("consumption", (("working", "2"), ("idle", "1/2")))


def with_plugins(*specs, seed=0):
    return EnvConfig(action="multidiscrete", plugins=tuple(specs), seed=seed)


def test_chain_runs_in_fixed_order():
    chain = compose_plugins([build_plugin(kind) for kind in reversed(PLUGIN_ORDER)])
    assert chain.kinds == PLUGIN_ORDER


def test_chain_rejects_duplicates_and_unknown_kinds():
    with pytest.raises(ConfigError):
        compose_plugins([build_plugin("breakdowns"), build_plugin("breakdowns")])
    with pytest.raises(ConfigError):
        build_plugin("teleporter")


@pytest.mark.parametrize("kind, params", [
    ("breakdowns", {"seed": "abc"}),
    ("stochastic", {"mean": "3"}),
    ("setup_times", {"duration": "1"}),
    ("consumption", {"spinning": "1"}),
    ("consumption", {"working": "-1"}),
    ("consumption", {"working": "x"}),
])
def test_bad_plugin_parameters(kind, params):
    with pytest.raises(ConfigError):
        build_plugin(kind, params)


def test_setup_delays_processing(single_op):
    inst = extend_instance(single_op, setup=2)
    chain = compose_plugins([build_plugin("setup_times")])
    s = initial_state(inst, plugins=chain)
    s, _ = apply_agent_events(inst, s, [Event(0, EventKind.MACHINE_ASSIGN, "m1", "J1", origin=AGENT)])
    s = settle_to_decision(inst, s)
    assert s.now == 7
    assert s.jobs["J1"].op_starts == (2,)
    assert s.aux["setup_times"] == {"setups": 1, "setup_time": 2}
    assert s.machines["m1"].setup_ticks == 2
    assert [r.kind for r in s.trace if r.resource == "m1"][:3] == ["MachineAssign", "SetupFinished", "MachineStarted"]


def test_setup_without_plugin_is_zero_length(single_op):
    inst = extend_instance(single_op, setup=2)
    trace, objectives = run_episode(inst, EnvConfig(), make_policy("spt"))
    assert objectives.makespan == 5
    assert trace.of_kind("SetupFinished") == ()


def test_degenerate_noise_reproduces_deterministic_trace(d2):
    baseline, _ = run_episode(d2, with_plugins(), make_policy("spt"))
    noisy = extend_instance(d2, stochastic=(UNIFORM, (1.0, 1.0)))
    trace, objectives = run_episode(noisy, with_plugins(PluginSpec("stochastic")), make_policy("spt"))
    assert trace.records == baseline.records
    assert objectives.makespan == 7


def test_stochastic_durations_are_seeded(d2):
    noisy = extend_instance(d2, stochastic=(UNIFORM, (0.5, 1.5)))
    cfg = with_plugins(PluginSpec("stochastic"))
    first, _ = run_episode(noisy, cfg, make_policy("spt"), seed=3)
    second, _ = run_episode(noisy, cfg, make_policy("spt"), seed=3)
    assert first.records == second.records
    samples = first.summary["plugins"]["stochastic"]["samples"]
    assert len(samples) == 4
    for sample in samples:
        assert sample["kind"] == "MachineCompleted"
        assert max(1, round(0.5 * sample["nominal"])) <= sample["realized"] <= round(1.5 * sample["nominal"])
    assert validate_trace(noisy, first) == []


def test_plugin_seed_overrides_master_seed(d2):
    noisy = extend_instance(d2, stochastic=(GAMMA, (2.0, 0.5)))
    pinned = with_plugins(PluginSpec("stochastic", (("seed", "99"),)))
    a, _ = run_episode(noisy, pinned, make_policy("spt"), seed=1)
    b, _ = run_episode(noisy, pinned, make_policy("spt"), seed=2)
    assert a.records == b.records


def test_transport_legs_are_retimed(d2):
    inst = extend_instance(d2, transports=1, travel=4, stochastic=(UNIFORM, (0.5, 0.5)),
                           stochastic_scope=TRANSPORT)
    trace, _ = run_episode(inst, with_plugins(PluginSpec("stochastic")), make_policy("spt"))
    samples = trace.summary["plugins"]["stochastic"]["samples"]
    assert samples
    assert all(s["realized"] == 2 for s in samples if s["nominal"] == 4)
    assert validate_trace(inst, trace) == []


def test_breakdowns_are_counted_and_seeded(d2):
    inst = extend_instance(d2, outage=(2, 1))
    cfg = with_plugins(PluginSpec("breakdowns"))
    trace, objectives = run_episode(inst, cfg, make_policy("mwkr"), seed=5)
    again, _ = run_episode(inst, cfg, make_policy("mwkr"), seed=5)
    assert trace.records == again.records
    output = trace.summary["plugins"]["breakdowns"]
    for resource in ("m1", "m2"):
        starts = [r for r in trace.records if r.kind == "BreakdownStart" and r.resource == resource]
        assert output["count"][resource] == len(starts)
    assert sum(output["count"].values()) > 0
    assert objectives.makespan >= 7
    assert validate_trace(inst, trace) == []


def test_outage_pauses_processing(d2):
    inst = extend_instance(d2, outage=(2, 3))
    trace, _ = run_episode(inst, with_plugins(PluginSpec("breakdowns")), make_policy("spt"), seed=0)
    machines = trace.summary["machines"]
    # processing time is never lost or gained through an outage
    assert machines["m1"]["busy"] == 7
    assert machines["m2"]["busy"] == 4


def test_consumption_totals(d2):
    trace, objectives = run_episode(d2, with_plugins(CONSUMPTION), make_policy("spt"))
    energy = trace.summary["plugins"]["consumption"]["energy"]
    assert energy == {"m1": Fraction(14), "m2": Fraction(19, 2)}
    assert objectives.total_energy == Fraction(47, 2)


def test_consumption_machine_override(d2):
    spec = PluginSpec("consumption", (("working", "2"), ("m1.working", "3")))
    trace, _ = run_episode(d2, with_plugins(spec), make_policy("spt"))
    assert trace.summary["plugins"]["consumption"]["energy"]["m1"] == Fraction(21)


def test_consumption_rejects_unknown_machine(d2):
    spec = PluginSpec("consumption", (("m9.working", "3"),))
    with pytest.raises(ConfigError):
        run_episode(d2, with_plugins(spec), make_policy("spt"))


def test_parse_rates():
    params = parse_rates({"working": "2", "setup": "1/3", "m2.idle": "0.25"})
    assert rate(params, "m1", "working") == 2
    assert rate(params, "m1", "setup") == Fraction(1, 3)
    assert rate(params, "m1", "idle") == 0
    assert rate(params, "m2", "idle") == Fraction(1, 4)


@pytest.mark.parametrize("seed", range(10))
def test_energy_matches_mode_intervals(seed):
    inst = extend_instance(random_instance(3, 3, seed=seed), setup=1, outage=(8, 2))
    spec = PluginSpec("consumption", (("working", "3"), ("setup", "2"), ("idle", "1/2"), ("outage", "1/7")))
    cfg = with_plugins(PluginSpec("setup_times"), PluginSpec("breakdowns"), spec, seed=seed)
    trace, _ = run_episode(inst, cfg, make_policy("random", seed), seed=seed)
    params = parse_rates(dict(spec.params))
    expected = Fraction(0)
    for machine, totals in trace.summary["machines"].items():
        expected += rate(params, machine, "working") * totals["busy"]
        for mode in MACHINE_MODES:
            if mode != "working":
                expected += rate(params, machine, mode) * totals[mode]
    assert trace.summary["plugins"]["consumption"]["total_energy"] == expected


def test_streams_are_independent_and_reproducible():
    a = stream_generator(7, "breakdowns/m1", 0).random()
    assert a == stream_generator(7, "breakdowns/m1", 0).random()
    assert a != stream_generator(7, "breakdowns/m1", 1).random()
    assert a != stream_generator(7, "breakdowns/m2", 0).random()
    assert a != stream_generator(8, "breakdowns/m1", 0).random()
    assert isinstance(stream_generator(0, "x", 0), np.random.Generator)


@pytest.mark.parametrize("seed", range(5))
def test_disabled_extensions_match_classical_reduction(seed):
    base = random_instance(3, 3, seed=seed)
    inst = extend_instance(base, setup=3, outage=(4, 2), stochastic=(GAMMA, (2.0, 0.5)))
    for name in ("spt", "mwkr", "random"):
        full, _ = run_episode(inst, EnvConfig(), make_policy(name, seed), seed=seed)
        reduced, _ = run_episode(classical_reduction(inst), EnvConfig(), make_policy(name, seed), seed=seed)
        assert full.records == reduced.records
