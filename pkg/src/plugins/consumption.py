"""
Energy consumption tracking.

Rates are energy per tick for each machine mode, given as exact fractions:

    plugin consumption working=2 idle=1/2 setup=1 outage=0 m1.working=3

A per-machine key (`<machine>.<mode>`) overrides the global rate. Energy is
accrued whenever a machine changes mode; the open interval up to the current
tick is included in the reported totals.
"""
import logging
from fractions import Fraction
from typing import Any, Dict, Mapping, Tuple

from src.exceptions import ConfigError
from src.instance.model import Instance
from src.plugins.base import CONSUMPTION, Plugin, PluginOutput, register
from src.simulation.events import Event
from src.simulation.state import MACHINE_MODES, SimState

logger = logging.getLogger(__name__)


def parse_rates(params: Mapping[str, str]) -> Dict[str, Any]:
    """
    Split `mode=value` and `machine.mode=value` parameters.

    Raises:
        ConfigError: unknown mode, malformed or negative rate
    """
    rates = {mode: Fraction(0) for mode in MACHINE_MODES}
    overrides = {}
    for key, raw in params.items():
        machine, _, mode = key.rpartition(".")
        if mode not in MACHINE_MODES:
            raise ConfigError(f"plug-in 'consumption': unknown mode '{mode}' in '{key}'")
        try:
            value = Fraction(str(raw))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"plug-in 'consumption': rate '{raw}' for '{key}' is not a number")
        if value < 0:
            raise ConfigError(f"plug-in 'consumption': rate for '{key}' must be >= 0")
        if machine:
            overrides[(machine, mode)] = value
        else:
            rates[mode] = value
    return {"rates": rates, "overrides": overrides}


def rate(params: Mapping[str, Any], machine: str, mode: str) -> Fraction:
    return params["overrides"].get((machine, mode), params["rates"][mode])


def max_rate(params: Mapping[str, Any], machine: str) -> Fraction:
    return max(rate(params, machine, mode) for mode in MACHINE_MODES)


def _report(s: SimState, params: Mapping[str, Any], closed: Dict[str, Fraction],
            snapshot: Dict[str, Tuple[str, int]]) -> PluginOutput:
    energy = {}
    for machine, (mode, since) in snapshot.items():
        energy[machine] = closed[machine] + rate(params, machine, mode) * (s.now - since)
    return {
        "closed": closed,
        "snapshot": snapshot,
        "energy": energy,
        "total_energy": sum(energy.values(), Fraction(0)),
    }


def initialize_consumption(inst: Instance, s: SimState, params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    for machine, _ in params["overrides"]:
        if machine not in s.machines:
            raise ConfigError(f"plug-in 'consumption': unknown machine '{machine}'")
    closed = {m: Fraction(0) for m in inst.machine_ids}
    snapshot = {m: (s.machines[m].mode, s.now) for m in inst.machine_ids}
    return s, _report(s, params, closed, snapshot)


def consumption_plugin(inst: Instance, s: SimState, e: Event,
                       params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    previous = s.aux.get(CONSUMPTION)
    if previous is None:
        s, previous = initialize_consumption(inst, s, params)
    closed = dict(previous["closed"])
    snapshot = dict(previous["snapshot"])
    for machine, state in s.machines.items():
        mode, since = snapshot[machine]
        if state.mode != mode:
            closed[machine] += rate(params, machine, mode) * (s.now - since)
            snapshot[machine] = (state.mode, s.now)
    return s, _report(s, params, closed, snapshot)


@register(CONSUMPTION)
def make_consumption(params: Mapping[str, str]) -> Plugin:
    return Plugin(kind=CONSUMPTION, transform=consumption_plugin, params=parse_rates(params),
                  initialize=initialize_consumption)
