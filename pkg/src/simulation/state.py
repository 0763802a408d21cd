"""
Simulation state.

A SimState is a value: transitions build a Draft (a private working copy),
mutate it, and freeze it into a new SimState. The input state is never
touched, so states can be shared between episode runners and compared with ==.
"""
from bisect import insort
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.instance.model import ANY, FIFO, NEUTRAL, SINK, SOURCE, Instance, pre_buffer_id
from src.simulation.events import AUTO, Event, EventKind

# Machine modes
IDLE = "idle"
SETUP = "setup"
WORKING = "working"
OUTAGE = "outage"
MACHINE_MODES = (IDLE, SETUP, WORKING, OUTAGE)

# Transport modes (IDLE and OUTAGE shared)
TO_PICKUP = "to_pickup"
LOADING = "loading"
TRANSIT = "transit"
UNLOADING = "unloading"


@dataclass(frozen=True)
class MachineState:
    mode: str = IDLE
    current_job: Optional[str] = None
    last_job_type: str = NEUTRAL
    mode_since: int = 0
    busy_until: Optional[int] = None
    interrupted: Optional[str] = None
    # events paused by an outage, with their remaining delay
    suspended: Tuple[Tuple[Event, int], ...] = ()
    # ticks spent in each mode before mode_since
    idle_ticks: int = 0
    setup_ticks: int = 0
    working_ticks: int = 0
    outage_ticks: int = 0

    def ticks_in(self, mode: str, now: int) -> int:
        total = getattr(self, f"{mode}_ticks")
        if self.mode == mode:
            total += now - self.mode_since
        return total


@dataclass(frozen=True)
class TransportState:
    mode: str = IDLE
    cargo: Tuple[str, ...] = ()
    location: str = SOURCE
    busy_until: Optional[int] = None
    claimed: Tuple[str, ...] = ()         # assigned, not yet picked up
    pickup: Optional[str] = None          # buffer id
    destination: Optional[str] = None     # buffer id
    interrupted: Optional[str] = None
    suspended: Tuple[Tuple[Event, int], ...] = ()


@dataclass(frozen=True)
class BufferState:
    id: str
    location: str
    slots: Tuple[str, ...] = ()
    capacity: Optional[int] = None
    order: str = ANY
    incoming: Tuple[str, ...] = ()        # reserved by transports en route

    def has_room(self) -> bool:
        return self.capacity is None or len(self.slots) + len(self.incoming) < self.capacity

    def movable(self) -> Tuple[str, ...]:
        """Jobs that may leave now: the oldest only for fifo buffers."""
        return self.slots[:1] if self.order == FIFO else self.slots


@dataclass(frozen=True)
class JobProgress:
    job: str
    next_op_index: int = 0
    op_starts: Tuple[int, ...] = ()
    op_ends: Tuple[int, ...] = ()
    done: bool = False
    ready_since: int = 0
    claimed_by: Optional[str] = None


@dataclass(frozen=True)
class TraceRecord:
    t: int
    kind: str
    resource: str
    job: Optional[str]
    priority: float
    origin: str
    round: int
    actor: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "kind": self.kind, "resource": self.resource, "job": self.job,
                "priority": self.priority, "origin": self.origin, "round": self.round,
                "actor": self.actor}


@dataclass(frozen=True)
class SimState:
    now: int
    machines: Dict[str, MachineState]
    transports: Dict[str, TransportState]
    buffers: Dict[str, BufferState]
    jobs: Dict[str, JobProgress]
    pending: Tuple[Event, ...] = ()
    rng: Tuple[Tuple[str, int], ...] = ()
    trace: Tuple[TraceRecord, ...] = ()
    aux: Dict[str, Any] = field(default_factory=dict)
    plugins: Any = None
    seed: int = 0
    horizon: int = 1
    round_index: int = 0
    seq: int = 0

    def evolve(self, **changes) -> "SimState":
        return replace(self, **changes)

    def stream_counter(self, name: str) -> int:
        return dict(self.rng).get(name, 0)


def destination_buffer(inst: Instance, progress: JobProgress) -> str:
    """Where a job goes next: its next machine's pre-buffer, or SINK when done."""
    if progress.done:
        return SINK
    return pre_buffer_id(inst.job(progress.job).ops[progress.next_op_index].machine)


class Draft:
    """Mutable working copy of a SimState."""

    def __init__(self, s: SimState):
        self.now = s.now
        self.machines = dict(s.machines)
        self.transports = dict(s.transports)
        self.buffers = dict(s.buffers)
        self.jobs = dict(s.jobs)
        self.pending: List[Event] = list(s.pending)
        self.rng = dict(s.rng)
        self.trace = list(s.trace)
        self.aux = dict(s.aux)
        self.plugins = s.plugins
        self.seed = s.seed
        self.horizon = s.horizon
        self.round_index = s.round_index
        self.seq = s.seq

    def freeze(self) -> SimState:
        return SimState(
            now=self.now,
            machines=self.machines,
            transports=self.transports,
            buffers=self.buffers,
            jobs=self.jobs,
            pending=tuple(self.pending),
            rng=tuple(sorted(self.rng.items())),
            trace=tuple(self.trace),
            aux=self.aux,
            plugins=self.plugins,
            seed=self.seed,
            horizon=self.horizon,
            round_index=self.round_index,
            seq=self.seq,
        )

    # Event queue

    def enqueue(self, kind: EventKind, time: int, resource: str,
                job: Optional[str] = None) -> Event:
        event = Event(time=time, kind=kind, resource=resource, job=job, origin=AUTO, seq=self.seq)
        self.seq += 1
        insort(self.pending, event, key=Event.sort_key)
        return event

    def discard(self, event: Event) -> bool:
        if event in self.pending:
            self.pending.remove(event)
            return True
        return False

    def pull(self, predicate: Callable[[Event], bool]) -> List[Event]:
        """Remove and return every queued event matching predicate."""
        taken = [e for e in self.pending if predicate(e)]
        self.pending = [e for e in self.pending if not predicate(e)]
        return taken

    def find(self, predicate: Callable[[Event], bool]) -> Optional[Event]:
        for event in self.pending:
            if predicate(event):
                return event
        return None

    def retime(self, event: Event, time: int) -> Event:
        """Replace a queued event by the same event at another time."""
        self.discard(event)
        return self.enqueue(event.kind, time, event.resource, event.job)

    # Trace

    def record(self, kind, resource: str, job: Optional[str], priority: float,
               origin: str = AUTO, actor: Optional[str] = None):
        self.trace.append(TraceRecord(
            t=self.now, kind=str(kind), resource=resource, job=job, priority=priority,
            origin=origin, round=self.round_index, actor=actor,
        ))

    def record_event(self, event: Event):
        self.record(event.kind, event.resource, event.job, event.priority, event.origin)

    # Components

    def update_machine(self, machine: str, **changes):
        current = self.machines[machine]
        mode = changes.get("mode", current.mode)
        if mode != current.mode:
            spent = self.now - current.mode_since
            key = f"{current.mode}_ticks"
            changes[key] = getattr(current, key) + spent
            changes["mode_since"] = self.now
        self.machines[machine] = replace(current, **changes)

    def update_transport(self, unit: str, **changes):
        self.transports[unit] = replace(self.transports[unit], **changes)

    def update_job(self, job: str, **changes):
        self.jobs[job] = replace(self.jobs[job], **changes)

    def buffer_of(self, job: str) -> Optional[str]:
        for buffer_id, buffer in self.buffers.items():
            if job in buffer.slots:
                return buffer_id
        return None

    def take(self, buffer_id: str, job: str, priority: float, actor: Optional[str] = None):
        buffer = self.buffers[buffer_id]
        slots = list(buffer.slots)
        slots.remove(job)
        self.buffers[buffer_id] = replace(buffer, slots=tuple(slots))
        self.record(EventKind.BUFFER_GET, buffer_id, job, priority, AUTO, actor)

    def put(self, buffer_id: str, job: str, priority: float, actor: Optional[str] = None):
        buffer = self.buffers[buffer_id]
        incoming = tuple(j for j in buffer.incoming if j != job)
        self.buffers[buffer_id] = replace(buffer, slots=buffer.slots + (job,), incoming=incoming)
        self.update_job(job, ready_since=self.now)
        self.record(EventKind.BUFFER_PUT, buffer_id, job, priority, AUTO, actor)

    def reserve(self, buffer_id: str, job: str):
        buffer = self.buffers[buffer_id]
        self.buffers[buffer_id] = replace(buffer, incoming=buffer.incoming + (job,))
