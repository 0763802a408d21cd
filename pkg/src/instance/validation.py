"""
Instance invariant checks.

validate_instance() reports every violation it finds as a human-readable
string; an empty list means the instance is valid.
"""
from collections import Counter
from typing import List

from src.instance.model import (
    ANY, DETERMINISTIC, FIFO, GAMMA, NEUTRAL, PROCESSING, RESERVED_IDS, TRANSPORT,
    UNIFORM, Instance,
)


def _duplicates(ids) -> List[str]:
    return sorted(i for i, n in Counter(ids).items() if n > 1)


def validate_instance(inst: Instance) -> List[str]:
    violations: List[str] = []
    machine_ids = set(inst.machine_ids)
    transport_ids = set(inst.transport_ids)
    locations = set(inst.locations)

    # Ids
    for ident in _duplicates(inst.job_ids):
        violations.append(f"duplicate job id '{ident}'")
    for ident in _duplicates(inst.machine_ids):
        violations.append(f"duplicate machine id '{ident}'")
    for ident in _duplicates(inst.transport_ids):
        violations.append(f"duplicate transport id '{ident}'")
    for ident in sorted(machine_ids & transport_ids):
        violations.append(f"id '{ident}' names both a machine and a transport")
    for ident in list(inst.machine_ids) + list(inst.transport_ids):
        if ident in RESERVED_IDS:
            violations.append(f"id '{ident}' is reserved")

    if not inst.jobs:
        violations.append("instance has no jobs")

    # Jobs and operations
    for job in inst.jobs:
        if not job.ops:
            violations.append(f"job {job.id}: no operations")
        if job.due is not None and job.due < 0:
            violations.append(f"job {job.id}: due date {job.due} < 0")
        if job.weight < 0:
            violations.append(f"job {job.id}: weight {job.weight} < 0")
        for index, op in enumerate(job.ops):
            if op.machine not in machine_ids:
                violations.append(f"job {job.id} op {index}: unknown machine '{op.machine}'")
            if not isinstance(op.duration, int) or op.duration <= 0:
                violations.append(
                    f"job {job.id} op {index}: processing time {op.duration} must be > 0"
                )

    # Machines and buffers
    for machine in inst.machines:
        for label, capacity in (("pre", machine.pre_buffer_capacity),
                                ("post", machine.post_buffer_capacity)):
            if capacity is not None and capacity < 1:
                violations.append(f"machine {machine.id}: {label} buffer capacity {capacity} < 1")
        if machine.buffer_order not in (FIFO, ANY):
            violations.append(f"machine {machine.id}: unknown buffer order '{machine.buffer_order}'")

    # Transports
    for unit in inst.transports:
        if unit.capacity < 1:
            violations.append(f"transport {unit.id}: capacity {unit.capacity} < 1")
        if unit.load_time < 0:
            violations.append(f"transport {unit.id}: load time {unit.load_time} < 0")
        if unit.unload_time < 0:
            violations.append(f"transport {unit.id}: unload time {unit.unload_time} < 0")

    # Travel matrix
    travel = inst.travel.as_dict()
    for (origin, destination), ticks in sorted(travel.items()):
        if origin not in locations or destination not in locations:
            violations.append(f"travel {origin} -> {destination}: unknown location")
        if ticks < 0:
            violations.append(f"travel {origin} -> {destination}: time {ticks} < 0")
        if origin == destination and ticks != 0:
            violations.append(f"travel {origin} -> {origin}: diagonal entry must be 0")
    if inst.transports:
        for origin in inst.locations:
            for destination in inst.locations:
                if origin != destination and (origin, destination) not in travel:
                    violations.append(f"travel matrix misses pair ({origin}, {destination})")

    # Setup rules
    seen = Counter((r.machine, r.from_type, r.to_type) for r in inst.setups)
    for (machine, from_type, to_type), n in sorted(seen.items()):
        if n > 1:
            violations.append(f"setup {machine} {from_type} -> {to_type}: {n} rules")
    for rule in inst.setups:
        if rule.machine not in machine_ids:
            violations.append(f"setup rule: unknown machine '{rule.machine}'")
        if rule.duration < 0:
            violations.append(f"setup {rule.machine} {rule.from_type} -> {rule.to_type}: duration < 0")
        if rule.to_type == NEUTRAL:
            violations.append(f"setup {rule.machine}: target type cannot be {NEUTRAL}")

    # Outages
    for spec in inst.outage_specs:
        if spec.resource not in machine_ids | transport_ids:
            violations.append(f"outage: unknown resource '{spec.resource}'")
        if spec.mean_time_between_failures <= 0:
            violations.append(f"outage {spec.resource}: mtbf must be > 0")
        if spec.mean_time_to_repair <= 0:
            violations.append(f"outage {spec.resource}: mttr must be > 0")

    # Stochastic specs
    for spec in inst.stochastic_specs:
        label = f"stochastic {spec.scope}"
        if spec.scope not in (PROCESSING, TRANSPORT):
            violations.append(f"{label}: unknown scope")
        if spec.distribution == DETERMINISTIC:
            if spec.params:
                violations.append(f"{label}: deterministic takes no parameters")
        elif spec.distribution == UNIFORM:
            if len(spec.params) != 2:
                violations.append(f"{label}: uniform needs lo and hi")
            else:
                lo, hi = spec.params
                if not 0 < lo <= hi:
                    violations.append(f"{label}: uniform bounds must satisfy 0 < lo <= hi")
        elif spec.distribution == GAMMA:
            if len(spec.params) != 2:
                violations.append(f"{label}: gamma needs shape and scale")
            elif min(spec.params) <= 0:
                violations.append(f"{label}: gamma shape and scale must be > 0")
        else:
            violations.append(f"{label}: unknown distribution '{spec.distribution}'")
        if spec.applies_to is not None:
            pool = machine_ids if spec.scope == PROCESSING else transport_ids
            if spec.applies_to not in pool:
                violations.append(f"{label}: unknown resource '{spec.applies_to}'")

    return violations
