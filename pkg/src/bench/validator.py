"""
Independent schedule validator.

Re-derives every job's whereabouts from trace records alone (jobs start in
SOURCE) and checks machine exclusivity, operation precedence, buffer and
cargo capacity, location continuity and intra-tick ordering. It does not use
any simulation transition code.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from src.instance.model import FIFO, SINK, SOURCE, Instance, post_buffer_id, pre_buffer_id
from src.simulation.trace import Trace

logger = logging.getLogger(__name__)

OVERLAP = "overlap"
PRECEDENCE = "precedence"
CAPACITY = "capacity"
TELEPORT = "teleport"
ORDERING = "ordering"

_BREAKDOWN = ("BreakdownStart", "RepairComplete")


@dataclass(frozen=True)
class Violation:
    kind: str
    details: str
    t: Optional[int] = None

    def __str__(self) -> str:
        when = f"t={self.t} " if self.t is not None else ""
        return f"[{self.kind}] {when}{self.details}"


class _Replay:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.violations: List[Violation] = []
        self.buffers: Dict[str, List[str]] = {SOURCE: list(inst.job_ids), SINK: []}
        self.capacity: Dict[str, Optional[int]] = {SOURCE: None, SINK: None}
        self.order: Dict[str, str] = {SOURCE: "any", SINK: "any"}
        self.location: Dict[str, str] = {SOURCE: SOURCE, SINK: SINK}
        for m in inst.machines:
            for buffer_id, cap in ((pre_buffer_id(m.id), m.pre_buffer_capacity),
                                   (post_buffer_id(m.id), m.post_buffer_capacity)):
                self.buffers[buffer_id] = []
                self.capacity[buffer_id] = cap
                self.order[buffer_id] = m.buffer_order
                self.location[buffer_id] = m.id
        # ("buffer", id) | ("machine", id) | ("transport", id) | ("hand", None)
        self.place: Dict[str, Tuple[str, Optional[str]]] = {j: ("buffer", SOURCE) for j in inst.job_ids}
        self.holding: Dict[str, Optional[str]] = {m: None for m in inst.machine_ids}
        self.cargo: Dict[str, List[str]] = {u: [] for u in inst.transport_ids}
        self.route: Dict[str, Tuple[Optional[str], Optional[str]]] = {}
        self.completed: Dict[str, int] = {j: 0 for j in inst.job_ids}
        self.last_end: Dict[str, int] = {}
        self.running: Dict[str, Optional[str]] = {m: None for m in inst.machine_ids}

    def flag(self, kind: str, details: str, t: Optional[int] = None):
        self.violations.append(Violation(kind, details, t))

    def next_location(self, job: str) -> str:
        ops = self.inst.job(job).ops
        k = self.completed[job]
        return ops[k].machine if k < len(ops) else SINK

    def buffer_get(self, t: int, buffer_id: str, job: str, actor: Optional[str]):
        if buffer_id not in self.buffers:
            self.flag(TELEPORT, f"get of {job} from unknown buffer {buffer_id}", t)
            return
        slots = self.buffers[buffer_id]
        if self.place.get(job) != ("buffer", buffer_id) or job not in slots:
            self.flag(TELEPORT, f"{job} taken from {buffer_id} but is at {self.place.get(job)}", t)
            return
        if self.order[buffer_id] == FIFO and slots[0] != job:
            self.flag(ORDERING, f"fifo {buffer_id}: {job} taken before {slots[0]}", t)
        slots.remove(job)

        if actor in self.holding:
            if buffer_id != pre_buffer_id(actor):
                self.flag(TELEPORT, f"{actor} took {job} from {buffer_id}", t)
            if self.holding[actor] is not None:
                self.flag(OVERLAP, f"{actor} takes {job} while holding {self.holding[actor]}", t)
            self.holding[actor] = job
            self.place[job] = ("machine", actor)
        elif actor in self.cargo:
            pickup, _ = self.route.get(actor, (None, None))
            if pickup is not None and self.location[buffer_id] != pickup:
                self.flag(TELEPORT, f"{actor} loads {job} at {self.location[buffer_id]}, assigned pickup {pickup}", t)
            self.cargo[actor].append(job)
            self.place[job] = ("transport", actor)
            capacity = self.inst.transport(actor).capacity
            if len(self.cargo[actor]) > capacity:
                self.flag(CAPACITY, f"{actor} carries {len(self.cargo[actor])} > {capacity}", t)
        else:
            self.place[job] = ("hand", None)

    def buffer_put(self, t: int, buffer_id: str, job: str, actor: Optional[str]):
        if buffer_id not in self.buffers:
            self.flag(TELEPORT, f"put of {job} into unknown buffer {buffer_id}", t)
            return
        where = self.place.get(job)
        if actor in self.holding:
            if where != ("machine", actor) or buffer_id != post_buffer_id(actor):
                self.flag(TELEPORT, f"{actor} puts {job} into {buffer_id} from {where}", t)
            self.holding[actor] = None
        elif actor in self.cargo:
            _, drop = self.route.get(actor, (None, None))
            if where != ("transport", actor):
                self.flag(TELEPORT, f"{actor} unloads {job} it does not carry", t)
            elif drop is not None and self.location[buffer_id] != drop:
                self.flag(TELEPORT, f"{actor} unloads {job} at {self.location[buffer_id]}, assigned drop {drop}", t)
            if job in self.cargo[actor]:
                self.cargo[actor].remove(job)
        else:
            if self.inst.transports:
                self.flag(TELEPORT, f"{job} moved into {buffer_id} without a transport", t)
            elif where != ("hand", None):
                previous = self.place.get(job)
                if previous and previous[0] == "buffer" and job in self.buffers.get(previous[1], []):
                    self.buffers[previous[1]].remove(job)
                else:
                    self.flag(TELEPORT, f"{job} put into {buffer_id} from {where}", t)
        if buffer_id.endswith(".pre") or buffer_id == SINK:
            expected = self.next_location(job)
            if self.location[buffer_id] != expected:
                self.flag(TELEPORT, f"{job} delivered to {buffer_id}, next stop is {expected}", t)
        self.buffers[buffer_id].append(job)
        self.place[job] = ("buffer", buffer_id)
        cap = self.capacity[buffer_id]
        if cap is not None and len(self.buffers[buffer_id]) > cap:
            self.flag(CAPACITY, f"{buffer_id} holds {len(self.buffers[buffer_id])} > {cap}", t)

    def machine_started(self, t: int, machine: str, job: str):
        ops = self.inst.job(job).ops
        k = self.completed[job]
        if k >= len(ops):
            self.flag(PRECEDENCE, f"{job} started on {machine} with no operation left", t)
            return
        if ops[k].machine != machine:
            self.flag(PRECEDENCE, f"{job} op {k} belongs on {ops[k].machine}, started on {machine}", t)
        if job in self.last_end and t < self.last_end[job]:
            self.flag(PRECEDENCE, f"{job} op {k} starts at {t} before op {k - 1} ends at {self.last_end[job]}", t)
        if self.running.get(machine) not in (None, job):
            self.flag(OVERLAP, f"{machine} starts {job} while processing {self.running[machine]}", t)
        if self.holding.get(machine) != job:
            self.flag(TELEPORT, f"{machine} starts {job} without holding it", t)
        self.running[machine] = job

    def machine_completed(self, t: int, machine: str, job: str):
        if self.running.get(machine) != job:
            self.flag(OVERLAP, f"{machine} completes {job} that it was not processing", t)
        self.running[machine] = None
        self.completed[job] += 1
        self.last_end[job] = t

    def transport_assign(self, t: int, unit: str, job: str):
        where = self.place.get(job, ("", None))
        pickup = self.location.get(where[1]) if where[0] == "buffer" else None
        current = self.route.get(unit)
        if current is None or not self.cargo.get(unit):
            self.route[unit] = (pickup, self.next_location(job))


def _check_ordering(trace: Trace, out: List[Violation]):
    last_t = None
    seen_regular_at: Optional[int] = None
    group_priority: Dict[Tuple[int, int], float] = {}
    for index, record in enumerate(trace.records):
        if last_t is not None and record.t < last_t:
            out.append(Violation(ORDERING, f"record {index} at t={record.t} after t={last_t}", record.t))
        if last_t != record.t:
            seen_regular_at = None
        last_t = record.t
        key = (record.t, record.round)
        previous = group_priority.get(key)
        if previous is not None and record.priority > previous:
            out.append(Violation(ORDERING, f"{record.kind} (priority {record.priority:g}) after priority "
                                           f"{previous:g} in round {record.round}", record.t))
        group_priority[key] = record.priority if previous is None else min(previous, record.priority)
        if record.kind in _BREAKDOWN:
            if seen_regular_at == record.t:
                out.append(Violation(ORDERING, f"{record.kind}({record.resource}) after a regular event", record.t))
        else:
            seen_regular_at = record.t


def validate_trace(inst: Instance, trace: Trace) -> List[Violation]:
    """
    Check a trace against the instance.

    Returns:
        List of violations, empty when the trace is feasible
    """
    replay = _Replay(inst)
    _check_ordering(trace, replay.violations)
    for record in trace.records:
        t, kind, resource, job, actor = record.t, record.kind, record.resource, record.job, record.actor
        if kind == "BufferGet" and job:
            replay.buffer_get(t, resource, job, actor)
        elif kind == "BufferPut" and job:
            replay.buffer_put(t, resource, job, actor)
        elif kind == "MachineStarted" and job:
            replay.machine_started(t, resource, job)
        elif kind == "MachineCompleted" and job:
            replay.machine_completed(t, resource, job)
        elif kind == "TransportAssign" and job:
            replay.transport_assign(t, resource, job)
    for job, place in replay.place.items():
        if place == ("hand", None):
            replay.flag(TELEPORT, f"{job} left a buffer and never arrived anywhere")
    if replay.violations:
        logger.debug(f"✗ {trace.instance}: {len(replay.violations)} violation(s), first: {replay.violations[0]}")
    return replay.violations
