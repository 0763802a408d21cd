"""
Objective vector.

Every value is derived from trace records (plus the summary block for energy
and machine busy time), so traces read back from JSON give the same result.
Values are exact: ints and Fractions.
"""
import logging
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

from src.exceptions import SimulationError
from src.instance.model import SINK, SOURCE, Instance
from src.simulation.events import EventKind
from src.simulation.state import WORKING, SimState, TraceRecord
from src.simulation.trace import Trace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObjectiveVector:
    makespan: int = 0
    max_lateness: int = 0
    total_weighted_completion: Fraction = Fraction(0)
    total_weighted_tardiness: Fraction = Fraction(0)
    weighted_tardy_count: Fraction = Fraction(0)
    total_energy: Fraction = Fraction(0)
    total_buffer_occupancy_time: int = 0
    mean_lead_time: Fraction = Fraction(0)
    machine_utilization: Fraction = Fraction(0)

    def to_dict(self) -> Dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


OBJECTIVE_NAMES = tuple(f.name for f in fields(ObjectiveVector))


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 9)
    return Fraction(value)


def completion_times(records: Iterable[TraceRecord]) -> Dict[str, int]:
    """Tick of the last MachineCompleted per job."""
    completed = {}
    for record in records:
        if record.kind == str(EventKind.MACHINE_COMPLETED) and record.job is not None:
            completed[record.job] = max(record.t, completed.get(record.job, record.t))
    return completed


def completed_op_counts(records: Iterable[TraceRecord]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for record in records:
        if record.kind == str(EventKind.MACHINE_COMPLETED) and record.job is not None:
            counts[record.job] = counts.get(record.job, 0) + 1
    return counts


def buffer_occupancy(records: Iterable[TraceRecord], until: int) -> int:
    """Job-ticks spent in machine buffers (SOURCE and SINK excluded) up to `until`."""
    entered: Dict[Tuple[str, str], int] = {}
    total = 0
    for record in records:
        if record.resource in (SOURCE, SINK) or record.job is None:
            continue
        key = (record.resource, record.job)
        if record.kind == str(EventKind.BUFFER_PUT):
            entered[key] = record.t
        elif record.kind == str(EventKind.BUFFER_GET) and key in entered:
            total += record.t - entered.pop(key)
    total += sum(until - t for t in entered.values())
    return total


def _evaluate(inst: Instance, completions: Mapping[str, int], now: int,
              records: Tuple[TraceRecord, ...], busy: int, energy) -> ObjectiveVector:
    """Objectives where unfinished jobs count as completing at `now`."""
    finish = {job.id: completions.get(job.id, now) for job in inst.jobs}
    lateness = [finish[job.id] - job.due for job in inst.jobs if job.due is not None]
    weighted_completion = sum((_exact(job.weight) * finish[job.id] for job in inst.jobs), Fraction(0))
    tardiness = Fraction(0)
    tardy = Fraction(0)
    for job in inst.jobs:
        if job.due is None:
            continue
        late = finish[job.id] - job.due
        if late > 0:
            tardiness += _exact(job.weight) * late
            tardy += _exact(job.weight)
    horizon = now * len(inst.machines)
    return ObjectiveVector(
        makespan=max(finish.values(), default=0),
        max_lateness=max(lateness) if lateness else 0,
        total_weighted_completion=weighted_completion,
        total_weighted_tardiness=tardiness,
        weighted_tardy_count=tardy,
        total_energy=_exact(energy),
        total_buffer_occupancy_time=buffer_occupancy(records, now),
        mean_lead_time=Fraction(sum(finish.values()), max(1, len(finish))),
        machine_utilization=Fraction(busy, horizon) if horizon else Fraction(0),
    )


def compute_objectives(inst: Instance, trace: Trace) -> ObjectiveVector:
    """
    Objective vector of a finished episode.

    Raises:
        SimulationError: some job has unfinished operations
    """
    counts = completed_op_counts(trace.records)
    unfinished = [job.id for job in inst.jobs if counts.get(job.id, 0) < len(job.ops)]
    if unfinished:
        raise SimulationError(f"objectives need a terminal trace, unfinished: {', '.join(unfinished)}")
    completions = completion_times(trace.records)
    makespan = max(completions.values(), default=0)
    machines = trace.summary.get("machines", {})
    if machines:
        busy = sum(int(m.get("busy", 0)) for m in machines.values())
    else:
        busy = sum(job.total_work for job in inst.jobs)
    energy = trace.summary.get("plugins", {}).get("consumption", {}).get("total_energy", 0)
    return _evaluate(inst, completions, makespan, tuple(trace.records), busy, energy)


def objective_potentials(inst: Instance, s: SimState) -> ObjectiveVector:
    """Objectives of the partial schedule in s; equals compute_objectives at the terminal state."""
    completions = {job: p.op_ends[-1] for job, p in s.jobs.items() if p.done}
    busy = sum(m.ticks_in(WORKING, s.now) for m in s.machines.values())
    energy = s.aux.get("consumption", {}).get("total_energy", 0)
    return _evaluate(inst, completions, s.now, s.trace, busy, energy)


def objective_value(vector: ObjectiveVector, name: str) -> Fraction:
    """Value in lower-is-better form (utilization becomes 1 - u)."""
    value = _exact(getattr(vector, name))
    if name == "machine_utilization":
        return 1 - value
    return value
