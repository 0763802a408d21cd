"""
Random instances and extension helpers for benchmark suites and tests.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.instance.model import (
    DETERMINISTIC, GAMMA, PROCESSING, TRANSPORT, UNIFORM, Instance, JobSpec, MachineSpec,
    OperationSpec, OutageSpec, SetupRule, StochasticSpec, TransportSpec, TravelTimeMatrix,
    NEUTRAL,
)


def random_instance(n_jobs: int, n_machines: int, seed: int,
                    low: int = 1, high: int = 9, name: Optional[str] = None) -> Instance:
    """
    Classical instance: each job visits every machine once in random order,
    durations uniform in [low, high].
    """
    rng = np.random.default_rng(seed)
    jobs = []
    for j in range(n_jobs):
        order = rng.permutation(n_machines)
        durations = rng.integers(low, high + 1, size=n_machines)
        ops = tuple(OperationSpec(machine=f"m{int(k) + 1}", duration=int(d))
                    for k, d in zip(order, durations))
        jobs.append(JobSpec(id=f"J{j + 1}", ops=ops))
    return Instance(
        name=name or f"rand{n_jobs}x{n_machines}_{seed}",
        jobs=tuple(jobs),
        machines=tuple(MachineSpec(id=f"m{k + 1}") for k in range(n_machines)),
    )


def uniform_travel(locations: Sequence[str], delta: int) -> TravelTimeMatrix:
    """Travel matrix with the same time for every ordered pair of distinct locations."""
    return TravelTimeMatrix(tuple((a, b, delta) for a in locations for b in locations if a != b))


def extend_instance(inst: Instance,
                    transports: int = 0,
                    travel: int = 1,
                    transport_capacity: int = 1,
                    load_time: int = 0,
                    unload_time: int = 0,
                    buffer_capacity: Optional[int] = None,
                    post_capacity: Optional[int] = None,
                    buffer_order: str = "any",
                    setup: Optional[int] = None,
                    outage: Optional[Tuple[int, int]] = None,
                    stochastic: Optional[Tuple[str, Tuple[float, ...]]] = None,
                    stochastic_scope: str = PROCESSING) -> Instance:
    """
    Copy of a classical instance with extensions switched on.

    Args:
        transports: Number of transport units (uniform travel time `travel`)
        buffer_capacity: Pre-buffer capacity of every machine
        post_capacity: Post-buffer capacity of every machine
        setup: Duration of every type change, including the first job on a machine
        outage: (mtbf, mttr) applied to every machine and transport
        stochastic: (distribution, params) applied to `stochastic_scope`
    """
    changes = {}
    if transports:
        units = tuple(TransportSpec(id=f"t{k + 1}", capacity=transport_capacity,
                                    load_time=load_time, unload_time=unload_time)
                      for k in range(transports))
        changes["transports"] = units
        changes["travel"] = uniform_travel(inst.locations, travel)
    if buffer_capacity is not None or post_capacity is not None or buffer_order != "any":
        changes["machines"] = tuple(
            MachineSpec(id=m.id, pre_buffer_capacity=buffer_capacity,
                        post_buffer_capacity=post_capacity, buffer_order=buffer_order)
            for m in inst.machines)
    if setup is not None:
        types = sorted({job.type for job in inst.jobs})
        rules = []
        for machine in inst.machine_ids:
            for to_type in types:
                rules.append(SetupRule(machine, NEUTRAL, to_type, setup))
                for from_type in types:
                    if from_type != to_type:
                        rules.append(SetupRule(machine, from_type, to_type, setup))
        changes["setups"] = tuple(rules)
    if outage is not None:
        mtbf, mttr = outage
        resources = inst.machine_ids + tuple(u.id for u in changes.get("transports", inst.transports))
        changes["outage_specs"] = tuple(OutageSpec(r, mtbf, mttr) for r in resources)
    if stochastic is not None:
        distribution, params = stochastic
        if distribution not in (DETERMINISTIC, UNIFORM, GAMMA):
            raise ValueError(f"unknown distribution {distribution}")
        if stochastic_scope not in (PROCESSING, TRANSPORT):
            raise ValueError(f"unknown scope {stochastic_scope}")
        changes["stochastic_specs"] = (StochasticSpec(stochastic_scope, distribution,
                                                      tuple(float(p) for p in params)),)
    return inst.evolve(**changes)
