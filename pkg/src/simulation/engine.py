"""
Composite transitions and episode queries.

advance() folds apply_event over the queued events of each tick, one sorted
batch ("round") at a time. Events produced during a round at the same tick
go into the next round.
"""
import logging
from typing import Iterable, List, Optional, Tuple

from src.exceptions import DeadlockError, InvalidTransition, SimulationError
from src.instance.model import SINK, SOURCE, Instance, post_buffer_id, pre_buffer_id
from src.simulation.events import (
    BREAKDOWN_KINDS, PRIORITY, CandidateAction, Event, EventKind, sort_events,
)
from src.simulation.state import (
    IDLE, LOADING, OUTAGE, BufferState, Draft, JobProgress, MachineState, SimState,
    TransportState, destination_buffer,
)
from src.simulation.transitions import apply_event, settle_buffers

logger = logging.getLogger(__name__)


class _Terminal:
    def __repr__(self) -> str:
        return "TERMINAL"


TERMINAL = _Terminal()


def horizon_bound(inst: Instance) -> int:
    """Static upper bound on episode length used for normalization."""
    bound = inst.total_work
    if inst.transports:
        legs = sum(len(job.ops) + 1 for job in inst.jobs)
        handling = max(u.load_time for u in inst.transports) + max(u.unload_time for u in inst.transports)
        # empty drive to the pickup plus the loaded leg
        bound += legs * (2 * inst.travel.max_time() + handling)
    if inst.setups:
        bound += inst.op_count * max(rule.duration for rule in inst.setups)
    return max(1, bound)


def initial_state(inst: Instance, plugins=None, seed: int = 0) -> SimState:
    """
    Fresh state at t = 0: every job waits in SOURCE, every resource is idle.

    Args:
        inst: Problem instance
        plugins: Optional PluginChain applied after every transition
        seed: Master seed of the named random streams

    Returns:
        Initial SimState (instantaneous flows and plug-in initialization applied)
    """
    buffers = {
        SOURCE: BufferState(id=SOURCE, location=SOURCE, slots=inst.job_ids),
        SINK: BufferState(id=SINK, location=SINK),
    }
    for machine in inst.machines:
        buffers[pre_buffer_id(machine.id)] = BufferState(
            id=pre_buffer_id(machine.id), location=machine.id,
            capacity=machine.pre_buffer_capacity, order=machine.buffer_order)
        buffers[post_buffer_id(machine.id)] = BufferState(
            id=post_buffer_id(machine.id), location=machine.id,
            capacity=machine.post_buffer_capacity, order=machine.buffer_order)

    s = SimState(
        now=0,
        machines={m: MachineState() for m in inst.machine_ids},
        transports={u: TransportState() for u in inst.transport_ids},
        buffers=buffers,
        jobs={j: JobProgress(job=j) for j in inst.job_ids},
        plugins=plugins,
        seed=int(seed),
        horizon=horizon_bound(inst),
    )
    draft = Draft(s)
    settle_buffers(inst, draft, PRIORITY[EventKind.BUFFER_PUT])
    s = draft.freeze()
    if plugins is not None:
        s = plugins.initialize(inst, s)
    return s


def next_event_time(s: SimState) -> Optional[int]:
    return s.pending[0].time if s.pending else None


def _run_round(inst: Instance, s: SimState, tick: int) -> SimState:
    batch = [e for e in s.pending if e.time == tick]
    s = s.evolve(now=tick, round_index=s.round_index + 1)
    for e in batch:
        # an earlier event of the batch may have suspended or replaced this one
        if e in s.pending:
            s = apply_event(inst, s, e)
    return s


def advance(inst: Instance, s: SimState, t: int) -> SimState:
    """
    Process every queued event with time <= t and move the clock to t.

    Raises:
        SimulationError: t lies before the current time
        InvalidTransition: a queued event was invalid (internal defect)
    """
    if t < s.now:
        raise SimulationError(f"cannot advance from {s.now} back to {t}")
    while s.pending and s.pending[0].time <= t:
        s = _run_round(inst, s, s.pending[0].time)
    if s.now != t:
        s = s.evolve(now=t)
    return s


def apply_agent_events(inst: Instance, s: SimState,
                       events: Iterable[Event]) -> Tuple[SimState, List[Tuple[Event, str]]]:
    """
    Apply agent events at the current tick as one round in priority order.

    Returns:
        (state, rejected) where rejected lists (event, reason) for events that
        were invalid when their turn came
    """
    s = s.evolve(round_index=s.round_index + 1)
    rejected = []
    for e in sort_events(events):
        try:
            s = apply_event(inst, s, e)
        except InvalidTransition as err:
            rejected.append((e, err.reason))
    return s, rejected


def is_terminal(s: SimState) -> bool:
    return all(progress.done for progress in s.jobs.values())


def makespan(s: SimState) -> int:
    if not is_terminal(s):
        raise SimulationError("makespan is only defined for terminal states")
    return max((p.op_ends[-1] for p in s.jobs.values() if p.op_ends), default=0)


def _awaiting(s: SimState) -> List[Tuple[str, str]]:
    """(job, buffer) pairs of unclaimed jobs that may be picked up now."""
    waiting = []
    for buffer_id, buffer in s.buffers.items():
        if buffer_id != SOURCE and not buffer_id.endswith(".post"):
            continue
        for job in buffer.movable():
            if s.jobs[job].claimed_by is None:
                waiting.append((job, buffer_id))
    return waiting


def enabled_actions(inst: Instance, s: SimState) -> List[CandidateAction]:
    """Valid agent events: machines by id then job id, then transports by id then job id."""
    if is_terminal(s):
        return []
    actions = []
    for machine in sorted(s.machines):
        if s.machines[machine].mode != IDLE:
            continue
        if not s.buffers[post_buffer_id(machine)].has_room():
            continue
        for job in sorted(s.buffers[pre_buffer_id(machine)].movable()):
            actions.append(CandidateAction(EventKind.MACHINE_ASSIGN, machine, job))

    if s.transports:
        waiting = _awaiting(s)
        for unit_id in sorted(s.transports):
            unit = s.transports[unit_id]
            capacity = inst.transport(unit_id).capacity
            jobs = []
            for job, buffer_id in waiting:
                target = destination_buffer(inst, s.jobs[job])
                if not s.buffers[target].has_room():
                    continue
                if unit.mode == IDLE:
                    jobs.append(job)
                elif (unit.mode == LOADING and buffer_id == unit.pickup and target == unit.destination
                      and len(unit.cargo) + len(unit.claimed) < capacity):
                    jobs.append(job)
            for job in sorted(jobs):
                actions.append(CandidateAction(EventKind.TRANSPORT_ASSIGN, unit_id, job))
    return actions


def _stuck(s: SimState) -> bool:
    if any(e.kind not in BREAKDOWN_KINDS for e in s.pending):
        return False
    resources = list(s.machines.values()) + list(s.transports.values())
    return not any(r.mode == OUTAGE for r in resources)


def settle_to_decision(inst: Instance, s: SimState) -> SimState:
    """
    Advance until at least one agent action is enabled or every job is done.

    Raises:
        DeadlockError: jobs remain but no queued event can ever enable an action
    """
    s = advance(inst, s, s.now)
    while not is_terminal(s) and not enabled_actions(inst, s):
        t = next_event_time(s)
        if t is None or _stuck(s):
            unfinished = sorted(j for j, p in s.jobs.items() if not p.done)
            raise DeadlockError(f"no action enabled at t={s.now}, unfinished jobs: {', '.join(unfinished)}")
        s = advance(inst, s, t)
    return s


def next_decision_time(inst: Instance, s: SimState):
    """Tick of the next decision point, or TERMINAL when every job is done."""
    settled = settle_to_decision(inst, s)
    return TERMINAL if is_terminal(settled) else settled.now
