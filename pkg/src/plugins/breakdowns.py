"""
Breakdown plug-in: exponential time to failure and time to repair per resource.

Each resource with an outage spec owns the stream `breakdowns/<id>`. The first
failure is drawn at initialization; a repair is drawn when the breakdown
starts and the next failure when the repair completes.
"""
import logging
from typing import Any, Mapping, Tuple

from src.instance.model import Instance, OutageSpec
from src.plugins.base import BREAKDOWNS, Plugin, PluginOutput, register, reject_unknown, seed_param
from src.simulation.events import Event, EventKind
from src.simulation.state import Draft, SimState
from src.simulation.streams import next_generator

logger = logging.getLogger(__name__)


def _draw_ticks(draft: Draft, resource: str, mean: float, seed) -> int:
    rng = next_generator(draft, f"{BREAKDOWNS}/{resource}", seed)
    return max(1, int(round(rng.exponential(mean))))


def _specs(inst: Instance) -> Mapping[str, OutageSpec]:
    return {spec.resource: spec for spec in inst.outage_specs}


def _output(s: SimState) -> PluginOutput:
    previous = s.aux.get(BREAKDOWNS)
    if previous is None:
        return {"count": {}, "downtime": {}}
    return {"count": dict(previous["count"]), "downtime": dict(previous["downtime"])}


def initialize_breakdowns(inst: Instance, s: SimState, params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    seed = seed_param(params, BREAKDOWNS)
    draft = Draft(s)
    output = {"count": {}, "downtime": {}}
    for resource, spec in _specs(inst).items():
        failure = draft.now + _draw_ticks(draft, resource, spec.mean_time_between_failures, seed)
        draft.enqueue(EventKind.BREAKDOWN_START, failure, resource)
        output["count"][resource] = 0
        output["downtime"][resource] = 0
    return draft.freeze(), output


def breakdown_plugin(inst: Instance, s: SimState, e: Event,
                     params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    """
    Schedule the repair after a breakdown and the next breakdown after a repair.

    Args:
        inst: Instance holding the outage specs
        s: State after the core transition of e
        e: Event just applied
        params: Optional `seed` override for the breakdown streams

    Returns:
        (state, {"count": {resource: n}, "downtime": {resource: ticks}})
    """
    output = _output(s)
    if not e.is_breakdown:
        return s, output
    spec = _specs(inst).get(e.resource)
    if spec is None:
        return s, output

    seed = seed_param(params, BREAKDOWNS)
    draft = Draft(s)
    if e.kind == EventKind.BREAKDOWN_START:
        repair = _draw_ticks(draft, e.resource, spec.mean_time_to_repair, seed)
        draft.enqueue(EventKind.REPAIR_COMPLETE, draft.now + repair, e.resource)
        output["count"][e.resource] = output["count"].get(e.resource, 0) + 1
        output["downtime"][e.resource] = output["downtime"].get(e.resource, 0) + repair
        logger.debug(f"{e.resource} breaks down at {draft.now} for {repair} ticks")
    else:
        failure = _draw_ticks(draft, e.resource, spec.mean_time_between_failures, seed)
        draft.enqueue(EventKind.BREAKDOWN_START, draft.now + failure, e.resource)
    return draft.freeze(), output


@register(BREAKDOWNS)
def make_breakdowns(params: Mapping[str, str]) -> Plugin:
    reject_unknown(params, BREAKDOWNS, ("seed",))
    seed_param(params, BREAKDOWNS)
    return Plugin(kind=BREAKDOWNS, transform=breakdown_plugin, params=dict(params),
                  initialize=initialize_breakdowns)
