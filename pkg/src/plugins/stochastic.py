"""
Stochastic durations.

After an event that schedules a timed follow-up (processing or a transport
leg), the follow-up is moved to now + round(d * factor), at least 1 tick,
where d is the nominal delay and factor comes from the instance's stochastic
spec for that resource. Zero-length delays are never retimed.
"""
import logging
from typing import Any, Mapping, Optional, Tuple

import numpy as np

from src.instance.model import DETERMINISTIC, GAMMA, PROCESSING, TRANSPORT, UNIFORM, Instance, StochasticSpec
from src.plugins.base import STOCHASTIC, Plugin, PluginOutput, register, reject_unknown, seed_param
from src.simulation.events import Event, EventKind
from src.simulation.state import Draft, SimState
from src.simulation.streams import next_generator

logger = logging.getLogger(__name__)

# applied event -> (scope, follow-up kind whose delay is a duration)
RETIMED = {
    EventKind.MACHINE_STARTED: (PROCESSING, EventKind.MACHINE_COMPLETED),
    EventKind.TRANSPORT_ASSIGN: (TRANSPORT, EventKind.TRANSPORT_ARRIVE_PICKUP),
    EventKind.TRANSPORT_LOADED: (TRANSPORT, EventKind.TRANSPORT_ARRIVE_DROP),
}


def resolve_spec(inst: Instance, scope: str, resource: str) -> Optional[StochasticSpec]:
    """Resource-specific spec first, then the spec covering every resource of the scope."""
    fallback = None
    for spec in inst.stochastic_specs:
        if spec.scope != scope:
            continue
        if spec.applies_to == resource:
            return spec
        if spec.applies_to is None and fallback is None:
            fallback = spec
    return fallback


def sample_factor(spec: StochasticSpec, rng: np.random.Generator) -> float:
    if spec.distribution == UNIFORM:
        lo, hi = spec.params
        return float(rng.uniform(lo, hi)) if hi > lo else float(lo)
    if spec.distribution == GAMMA:
        shape, scale = spec.params
        return float(rng.gamma(shape, scale))
    return 1.0


def stochasticity_plugin(inst: Instance, s: SimState, e: Event,
                         params: Mapping[str, Any]) -> Tuple[SimState, PluginOutput]:
    """
    Replace a nominal duration by a sampled one.

    Returns:
        (state, {"samples": [{resource, kind, nominal, realized}, ...]})
    """
    output = {"samples": list(s.aux.get(STOCHASTIC, {}).get("samples", []))}
    if e.kind not in RETIMED:
        return s, output
    scope, follow_up = RETIMED[e.kind]
    spec = resolve_spec(inst, scope, e.resource)
    if spec is None:
        return s, output

    draft = Draft(s)
    queued = draft.find(lambda q: q.kind == follow_up and q.resource == e.resource)
    if queued is None:
        return s, output
    nominal = queued.time - draft.now
    if nominal <= 0:
        return s, output

    if spec.distribution == DETERMINISTIC:
        realized = nominal
    else:
        rng = next_generator(draft, f"{STOCHASTIC}/{scope}/{e.resource}", seed_param(params, STOCHASTIC))
        realized = max(1, int(round(nominal * sample_factor(spec, rng))))
    if realized != nominal:
        draft.retime(queued, draft.now + realized)
        if e.resource in draft.machines:
            draft.update_machine(e.resource, busy_until=draft.now + realized)
        else:
            draft.update_transport(e.resource, busy_until=draft.now + realized)
    output["samples"].append({"resource": e.resource, "kind": str(follow_up),
                              "nominal": nominal, "realized": realized})
    return draft.freeze(), output


@register(STOCHASTIC)
def make_stochastic(params: Mapping[str, str]) -> Plugin:
    reject_unknown(params, STOCHASTIC, ("seed",))
    seed_param(params, STOCHASTIC)
    return Plugin(kind=STOCHASTIC, transform=stochasticity_plugin, params=dict(params))
