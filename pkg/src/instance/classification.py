"""
Three-field classification and the classical J||Cmax reduction.
"""
from typing import Optional

from config.settings import DEFAULT_OBJECTIVE
from src.instance.model import (
    BETA_ORDER, DETERMINISTIC, Instance, MachineSpec, ThreeFieldTag, TravelTimeMatrix,
)


def classify(inst: "Instance", objective: Optional[str] = None) -> ThreeFieldTag:
    """
    Tag an instance with alpha|beta|gamma.

    Beta lists exactly the active extensions, in canonical order.
    """
    active = set()
    if inst.transports:
        active.add("transport")
    if any(m.pre_buffer_capacity is not None or m.post_buffer_capacity is not None
           for m in inst.machines):
        active.add("buffer")
    if inst.setups:
        active.add("setup")
    if inst.outage_specs:
        active.add("breakdown")
    if any(spec.distribution != DETERMINISTIC for spec in inst.stochastic_specs):
        active.add("stochastic")
    beta = tuple(name for name in BETA_ORDER if name in active)
    return ThreeFieldTag(alpha="J", beta=beta, gamma=objective or DEFAULT_OBJECTIVE)


def classical_reduction(inst: Instance) -> Instance:
    """
    Strip every extension: no transports, zero travel, unbounded buffers,
    no setups, outages or stochastic specs.

    Job and operation data (ids, order, durations, due dates, weights) are kept.
    """
    machines = tuple(MachineSpec(id=m.id) for m in inst.machines)
    return inst.evolve(
        machines=machines,
        transports=(),
        travel=TravelTimeMatrix(),
        setups=(),
        outage_specs=(),
        stochastic_specs=(),
    )


def is_classical(inst: Instance) -> bool:
    return not inst.classification.beta
