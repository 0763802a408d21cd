"""
Problem-instance data model.

Instances are immutable values. Time is measured in integer ticks.
Locations are machine ids plus the reserved SOURCE and SINK.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

SOURCE = "SOURCE"
SINK = "SINK"
NEUTRAL = "NEUTRAL"
RESERVED_IDS = (SOURCE, SINK, NEUTRAL)

FIFO = "fifo"
ANY = "any"

PROCESSING = "processing"
TRANSPORT = "transport"

DETERMINISTIC = "deterministic"
UNIFORM = "uniform"
GAMMA = "gamma"

# Canonical order of the beta field
BETA_ORDER = ("transport", "buffer", "setup", "breakdown", "stochastic")


def pre_buffer_id(machine: str) -> str:
    return f"{machine}.pre"


def post_buffer_id(machine: str) -> str:
    return f"{machine}.post"


@dataclass(frozen=True)
class OperationSpec:
    machine: str
    duration: int


@dataclass(frozen=True)
class JobSpec:
    id: str
    ops: Tuple[OperationSpec, ...]
    job_type: Optional[str] = None
    due: Optional[int] = None
    weight: float = 1.0

    @property
    def type(self) -> str:
        """Job type; defaults to the job id."""
        return self.job_type if self.job_type is not None else self.id

    @property
    def total_work(self) -> int:
        return sum(op.duration for op in self.ops)


@dataclass(frozen=True)
class MachineSpec:
    id: str
    pre_buffer_capacity: Optional[int] = None   # None = unbounded
    post_buffer_capacity: Optional[int] = None
    buffer_order: str = ANY


@dataclass(frozen=True)
class TransportSpec:
    id: str
    capacity: int = 1
    load_time: int = 0
    unload_time: int = 0


@dataclass(frozen=True)
class TravelTimeMatrix:
    """Travel times between locations, stored as sorted (from, to, ticks) triples."""
    entries: Tuple[Tuple[str, str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @classmethod
    def from_mapping(cls, mapping: Dict[Tuple[str, str], int]) -> "TravelTimeMatrix":
        return cls(tuple((a, b, t) for (a, b), t in mapping.items()))

    def as_dict(self) -> Dict[Tuple[str, str], int]:
        return {(a, b): t for a, b, t in self.entries}

    def time(self, origin: str, destination: str) -> int:
        if origin == destination:
            return 0
        for a, b, t in self.entries:
            if a == origin and b == destination:
                return t
        raise KeyError(f"no travel entry {origin} -> {destination}")

    def max_time(self) -> int:
        return max((t for _, _, t in self.entries), default=0)


@dataclass(frozen=True)
class SetupRule:
    machine: str
    from_type: str
    to_type: str
    duration: int


@dataclass(frozen=True)
class OutageSpec:
    resource: str
    mean_time_between_failures: int
    mean_time_to_repair: int


@dataclass(frozen=True)
class StochasticSpec:
    scope: str = PROCESSING
    distribution: str = DETERMINISTIC
    params: Tuple[float, ...] = ()      # uniform: (lo, hi); gamma: (shape, scale)
    applies_to: Optional[str] = None    # None = all resources of the scope


@dataclass(frozen=True)
class ThreeFieldTag:
    alpha: str = "J"
    beta: Tuple[str, ...] = ()
    gamma: str = "Cmax"

    def __str__(self) -> str:
        if not self.beta:
            return f"{self.alpha} || {self.gamma}"
        return f"{self.alpha} | {', '.join(self.beta)} | {self.gamma}"


@dataclass(frozen=True)
class Instance:
    name: str
    jobs: Tuple[JobSpec, ...]
    machines: Tuple[MachineSpec, ...]
    transports: Tuple[TransportSpec, ...] = ()
    travel: TravelTimeMatrix = field(default_factory=TravelTimeMatrix)
    setups: Tuple[SetupRule, ...] = ()
    outage_specs: Tuple[OutageSpec, ...] = ()
    stochastic_specs: Tuple[StochasticSpec, ...] = ()
    classification: Optional[ThreeFieldTag] = None

    def __post_init__(self):
        if self.classification is None:
            from src.instance.classification import classify
            object.__setattr__(self, "classification", classify(self))

    def job(self, job_id: str) -> JobSpec:
        for job in self.jobs:
            if job.id == job_id:
                return job
        raise KeyError(job_id)

    def machine(self, machine_id: str) -> MachineSpec:
        for machine in self.machines:
            if machine.id == machine_id:
                return machine
        raise KeyError(machine_id)

    def transport(self, transport_id: str) -> TransportSpec:
        for unit in self.transports:
            if unit.id == transport_id:
                return unit
        raise KeyError(transport_id)

    @property
    def job_ids(self) -> Tuple[str, ...]:
        return tuple(job.id for job in self.jobs)

    @property
    def machine_ids(self) -> Tuple[str, ...]:
        return tuple(machine.id for machine in self.machines)

    @property
    def transport_ids(self) -> Tuple[str, ...]:
        return tuple(unit.id for unit in self.transports)

    @property
    def locations(self) -> Tuple[str, ...]:
        return (SOURCE,) + self.machine_ids + (SINK,)

    @property
    def op_count(self) -> int:
        return sum(len(job.ops) for job in self.jobs)

    @property
    def total_work(self) -> int:
        return sum(job.total_work for job in self.jobs)

    @property
    def has_transport(self) -> bool:
        return bool(self.transports)

    def evolve(self, **changes) -> "Instance":
        """Copy with changes; the classification is recomputed."""
        changes.setdefault("classification", None)
        return replace(self, **changes)
