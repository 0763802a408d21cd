"""
Setup-time plug-in.

Without this plug-in MachineAssign puts the machine straight into WORKING and
MachineStarted follows in the same tick. With it, a matching rule (last job
type -> next job type) switches the machine to SETUP and delays
MachineStarted by the rule's duration.
"""
from typing import Any, Mapping, Tuple

from src.instance.model import Instance
from src.plugins.base import SETUP_TIMES, Plugin, PluginOutput, register, reject_unknown
from src.simulation.events import Event, EventKind
from src.simulation.state import SETUP, Draft, SimState


def setup_duration(inst: Instance, machine: str, from_type: str, to_type: str) -> int:
    for rule in inst.setups:
        if rule.machine == machine and rule.from_type == from_type and rule.to_type == to_type:
            return rule.duration
    return 0


def setup_time_plugin(inst: Instance, s: SimState, e: Event,
                      params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    previous = s.aux.get(SETUP_TIMES, {"setups": 0, "setup_time": 0})
    output = dict(previous)
    if e.kind != EventKind.MACHINE_ASSIGN:
        return s, output

    machine = s.machines[e.resource]
    duration = setup_duration(inst, e.resource, machine.last_job_type, inst.job(e.job).type)
    if duration <= 0:
        return s, output

    draft = Draft(s)
    started = draft.find(lambda q: q.kind == EventKind.MACHINE_STARTED
                         and q.resource == e.resource and q.job == e.job)
    if started is None:
        return s, output
    draft.discard(started)
    draft.enqueue(EventKind.SETUP_FINISHED, draft.now + duration, e.resource, e.job)
    draft.update_machine(e.resource, mode=SETUP, busy_until=draft.now + duration)
    output["setups"] += 1
    output["setup_time"] += duration
    return draft.freeze(), output


@register(SETUP_TIMES)
def make_setup_times(params: Mapping[str, str]) -> Plugin:
    reject_unknown(params, SETUP_TIMES, ())
    return Plugin(kind=SETUP_TIMES, transform=setup_time_plugin, params=dict(params))
