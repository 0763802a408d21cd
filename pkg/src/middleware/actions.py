"""
Action factories: decode an agent action into agent events.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from src.instance.model import Instance
from src.simulation.engine import enabled_actions
from src.simulation.events import Event, EventKind
from src.simulation.state import SimState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Decoded:
    """Result of decoding one action."""
    events: Tuple[Event, ...] = ()
    pointer: int = 0
    defers: int = 0
    advance: bool = False       # move time to the next queued event
    rejected: bool = False      # malformed action, step is refused
    invalid: Tuple[str, ...] = ()


def decode_binary(inst: Instance, s: SimState, commit: bool,
                  pointer: int = 0, defers: int = 0) -> Decoded:
    """
    Commit or defer the current candidate.

    Deferring moves the pointer to the next candidate. After a full rotation of
    defers, time is forced forward to the next queued event; when nothing is
    queued the current candidate is committed instead.
    """
    candidates = enabled_actions(inst, s)
    if not candidates:
        return Decoded(advance=True)
    pointer %= len(candidates)
    if commit:
        return Decoded(events=(candidates[pointer].to_event(s.now),))

    defers += 1
    if defers < len(candidates):
        return Decoded(pointer=(pointer + 1) % len(candidates), defers=defers)
    if s.pending:
        return Decoded(advance=True)
    logger.debug(f"Full defer rotation with an empty queue at t={s.now}: committing {candidates[pointer]}")
    return Decoded(events=(candidates[pointer].to_event(s.now),))


def action_slots(inst: Instance) -> Tuple[str, ...]:
    """Resource per multidiscrete slot: machines, then transports, in instance order."""
    return inst.machine_ids + inst.transport_ids


def decode_multidiscrete(inst: Instance, s: SimState, choices: Sequence[int]) -> Decoded:
    """
    One job choice per resource slot; 0 is no-op, k the k-th job in instance order.

    A vector of the wrong length or with an out-of-range value is rejected.
    Pairs that are not enabled are dropped and listed in `invalid`.
    An all-zero vector asks for a time advance.
    """
    slots = action_slots(inst)
    n_jobs = len(inst.jobs)
    try:
        values = [int(v) for v in choices]
    except (TypeError, ValueError):
        return Decoded(rejected=True, invalid=(f"malformed action {choices!r}",))
    if len(values) != len(slots):
        return Decoded(rejected=True, invalid=(f"expected {len(slots)} slots, got {len(values)}",))
    out_of_range = [v for v in values if not 0 <= v <= n_jobs]
    if out_of_range:
        return Decoded(rejected=True, invalid=(f"job index {out_of_range[0]} outside [0, {n_jobs}]",))
    if not any(values):
        return Decoded(advance=True)

    enabled = {(c.resource, c.job): c for c in enabled_actions(inst, s)}
    machines = set(inst.machine_ids)
    events: List[Event] = []
    invalid: List[str] = []
    for resource, value in zip(slots, values):
        if value == 0:
            continue
        job = inst.jobs[value - 1].id
        candidate = enabled.get((resource, job))
        if candidate is None:
            kind = EventKind.MACHINE_ASSIGN if resource in machines else EventKind.TRANSPORT_ASSIGN
            invalid.append(f"{kind.value}({resource}, {job}) not enabled")
            continue
        events.append(candidate.to_event(s.now))
    return Decoded(events=tuple(events), invalid=tuple(invalid))


ACTION_FACTORIES = {"binary": decode_binary, "multidiscrete": decode_multidiscrete}
