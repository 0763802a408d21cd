"""
Priority dispatching rules.

Rules pick one candidate per decision step. Machine assignments come first;
transport assignments are dispatched only when no machine candidate exists:
the job waiting longest goes first, carried by the nearest unit.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from src.exceptions import ConfigError
from src.instance.model import Instance
from src.simulation.events import CandidateAction, EventKind
from src.simulation.state import SimState

logger = logging.getLogger(__name__)

Chooser = Callable[[Instance, SimState, List[CandidateAction]], CandidateAction]


@dataclass(frozen=True)
class Policy:
    name: str
    choose: Chooser

    def __call__(self, inst: Instance, s: SimState, candidates: List[CandidateAction]) -> CandidateAction:
        if not candidates:
            raise ValueError(f"policy {self.name}: no candidates")
        return self.choose(inst, s, candidates)


def remaining_work(inst: Instance, s: SimState, job_id: str) -> int:
    return sum(op.duration for op in inst.job(job_id).ops[s.jobs[job_id].next_op_index:])


def next_duration(inst: Instance, s: SimState, job_id: str) -> int:
    return inst.job(job_id).ops[s.jobs[job_id].next_op_index].duration


def _split(candidates: List[CandidateAction]):
    machines = [c for c in candidates if c.kind == EventKind.MACHINE_ASSIGN]
    transports = [c for c in candidates if c.kind == EventKind.TRANSPORT_ASSIGN]
    return machines, transports


def _pickup_location(s: SimState, job_id: str) -> Optional[str]:
    for buffer in s.buffers.values():
        if job_id in buffer.slots:
            return buffer.location
    return None


def dispatch_transport(inst: Instance, s: SimState, transports: List[CandidateAction]) -> CandidateAction:
    """Longest-waiting job (smallest ready_since, then job id), nearest unit (then unit id)."""
    job = min({c.job for c in transports}, key=lambda j: (s.jobs[j].ready_since, j))
    location = _pickup_location(s, job)

    def distance(c: CandidateAction) -> int:
        unit = s.transports[c.resource]
        if location is None or unit.location == location:
            return 0
        return inst.travel.time(unit.location, location)

    return min((c for c in transports if c.job == job), key=lambda c: (distance(c), c.resource))


def spt(inst: Instance, s: SimState, candidates: List[CandidateAction]) -> CandidateAction:
    machines, transports = _split(candidates)
    if machines:
        return min(machines, key=lambda c: (next_duration(inst, s, c.job), c.job, c.resource))
    return dispatch_transport(inst, s, transports)


def mwkr(inst: Instance, s: SimState, candidates: List[CandidateAction]) -> CandidateAction:
    machines, transports = _split(candidates)
    if machines:
        return min(machines, key=lambda c: (-remaining_work(inst, s, c.job), c.job, c.resource))
    return dispatch_transport(inst, s, transports)


spt_policy = Policy("spt", spt)
mwkr_policy = Policy("mwkr", mwkr)


def random_policy(seed: int) -> Policy:
    """Uniform choice over candidates; a fresh policy per episode gives identical runs per seed."""
    rng = np.random.default_rng(seed)

    def choose(inst: Instance, s: SimState, candidates: List[CandidateAction]) -> CandidateAction:
        return candidates[int(rng.integers(len(candidates)))]

    return Policy("random", choose)


POLICIES: Dict[str, Callable[[int], Policy]] = {
    "spt": lambda seed: spt_policy,
    "mwkr": lambda seed: mwkr_policy,
    "random": random_policy,
}


def make_policy(name: str, seed: int = 0) -> Policy:
    factory = POLICIES.get(name)
    if factory is None:
        raise ConfigError(f"unknown policy '{name}' (known: {', '.join(POLICIES)})")
    return factory(seed)
