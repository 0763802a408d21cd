"""
Events and the priority function.

Events at the same tick are applied in descending priority. Only three
orderings are fixed by the model: breakdown events outrank everything,
transport deliveries come before machine starts, and machine completions
come before transport pickups. The remaining values are a fixed choice.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

AGENT = "agent"
AUTO = "auto"


class EventKind(str, Enum):
    TRANSPORT_ASSIGN = "TransportAssign"
    TRANSPORT_ARRIVE_PICKUP = "TransportArrivePickup"
    TRANSPORT_LOADED = "TransportLoaded"
    TRANSPORT_ARRIVE_DROP = "TransportArriveDrop"
    TRANSPORT_DELIVERED = "TransportDelivered"
    MACHINE_ASSIGN = "MachineAssign"
    SETUP_FINISHED = "SetupFinished"
    MACHINE_STARTED = "MachineStarted"
    MACHINE_COMPLETED = "MachineCompleted"
    BUFFER_PUT = "BufferPut"
    BUFFER_GET = "BufferGet"
    BREAKDOWN_START = "BreakdownStart"
    REPAIR_COMPLETE = "RepairComplete"
    JOB_FINISHED = "JobFinished"

    def __str__(self) -> str:
        return self.value


BREAKDOWN_KINDS = frozenset({EventKind.BREAKDOWN_START, EventKind.REPAIR_COMPLETE})
AGENT_KINDS = frozenset({EventKind.MACHINE_ASSIGN, EventKind.TRANSPORT_ASSIGN})

PRIORITY = {
    EventKind.BREAKDOWN_START: 100.0,
    EventKind.REPAIR_COMPLETE: 90.0,
    EventKind.TRANSPORT_DELIVERED: 80.0,
    EventKind.TRANSPORT_ARRIVE_DROP: 80.0,
    EventKind.MACHINE_COMPLETED: 70.0,
    EventKind.TRANSPORT_ARRIVE_PICKUP: 60.0,
    EventKind.TRANSPORT_ASSIGN: 60.0,
    EventKind.TRANSPORT_LOADED: 60.0,
    EventKind.SETUP_FINISHED: 55.0,
    EventKind.MACHINE_STARTED: 50.0,
    EventKind.MACHINE_ASSIGN: 50.0,
    EventKind.BUFFER_PUT: 40.0,
    EventKind.BUFFER_GET: 40.0,
    EventKind.JOB_FINISHED: 10.0,
}


@dataclass(frozen=True)
class Event:
    time: int
    kind: EventKind
    resource: str
    job: Optional[str] = None
    origin: str = AUTO
    seq: int = 0

    @property
    def priority(self) -> float:
        return priority(self)

    @property
    def is_breakdown(self) -> bool:
        return self.kind in BREAKDOWN_KINDS

    def sort_key(self) -> Tuple:
        """(time, descending priority, resource id, job id, insertion order)."""
        return (self.time, -PRIORITY[self.kind], self.resource, self.job or "", self.seq)

    def __str__(self) -> str:
        job = f", {self.job}" if self.job else ""
        return f"{self.kind.value}({self.resource}{job})@{self.time}"


def priority(e: Event) -> float:
    return PRIORITY[e.kind]


def sort_events(events) -> Tuple[Event, ...]:
    """Sort by time, then descending priority, then (resource id, job id)."""
    return tuple(sorted(events, key=Event.sort_key))


@dataclass(frozen=True)
class CandidateAction:
    """An agent-triggerable event that is valid right now."""
    kind: EventKind
    resource: str
    job: str

    def to_event(self, now: int) -> Event:
        return Event(time=now, kind=self.kind, resource=self.resource, job=self.job, origin=AGENT)

    def __str__(self) -> str:
        return f"{self.kind.value}({self.resource}, {self.job})"
