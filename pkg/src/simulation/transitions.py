"""
Atomic transitions.

apply_event checks that an event is valid, applies its effect to a Draft of
the state, records it in the trace and runs the plug-in chain. Invalid events
raise InvalidTransition before anything is built, so the input is untouched.
"""
import logging
from typing import Callable, Dict

from src.exceptions import InvalidTransition
from src.instance.model import FIFO, SINK, SOURCE, Instance, post_buffer_id, pre_buffer_id
from src.simulation.events import Event, EventKind
from src.simulation.state import (
    IDLE, LOADING, OUTAGE, SETUP, TO_PICKUP, TRANSIT, UNLOADING, WORKING,
    Draft, SimState, destination_buffer,
)

logger = logging.getLogger(__name__)

MACHINE_PROGRESS = frozenset({
    EventKind.SETUP_FINISHED, EventKind.MACHINE_STARTED, EventKind.MACHINE_COMPLETED,
})
TRANSPORT_PROGRESS = frozenset({
    EventKind.TRANSPORT_ARRIVE_PICKUP, EventKind.TRANSPORT_LOADED,
    EventKind.TRANSPORT_ARRIVE_DROP, EventKind.TRANSPORT_DELIVERED,
})


def apply_event(inst: Instance, s: SimState, e: Event) -> SimState:
    """
    Apply one event at the current tick.

    Args:
        inst: Problem instance
        s: Current state (not modified)
        e: Event with e.time == s.now

    Returns:
        Successor state, with the event and any buffer moves appended to the trace
    """
    if e.time != s.now:
        raise InvalidTransition(f"event time {e.time} differs from current time {s.now}", e)
    handler = _HANDLERS.get(e.kind)
    if handler is None:
        raise InvalidTransition(f"unknown event kind {e.kind}", e)
    draft = Draft(s)
    draft.discard(e)
    handler(inst, draft, e)
    successor = draft.freeze()
    if s.plugins is not None:
        successor = s.plugins.apply(inst, successor, e)
    return successor


def settle_buffers(inst: Instance, draft: Draft, priority: float):
    """
    Without transports, move waiting jobs onward as soon as there is room:
    SOURCE to the first pre-buffer, post-buffers to the next pre-buffer or SINK.
    """
    if inst.transports:
        return
    sources = (SOURCE,) + tuple(post_buffer_id(m) for m in inst.machine_ids)
    moved = True
    while moved:
        moved = False
        for source in sources:
            for job in draft.buffers[source].movable():
                target = destination_buffer(inst, draft.jobs[job])
                if not draft.buffers[target].has_room():
                    continue
                draft.take(source, job, priority)
                draft.put(target, job, priority)
                moved = True
                break


# Machines

def _machine_idle_or_raise(draft: Draft, e: Event):
    if e.resource not in draft.machines:
        raise InvalidTransition(f"unknown machine {e.resource}", e)
    mode = draft.machines[e.resource].mode
    if mode == OUTAGE:
        raise InvalidTransition("machine in outage", e)
    if mode != IDLE:
        raise InvalidTransition("machine busy", e)


def _job_or_raise(draft: Draft, e: Event):
    if e.job is None or e.job not in draft.jobs:
        raise InvalidTransition(f"unknown job {e.job}", e)
    return draft.jobs[e.job]


def _machine_assign(inst: Instance, draft: Draft, e: Event):
    _machine_idle_or_raise(draft, e)
    progress = _job_or_raise(draft, e)
    if progress.done:
        raise InvalidTransition("job already finished", e)
    if inst.job(e.job).ops[progress.next_op_index].machine != e.resource:
        raise InvalidTransition("next operation of the job is on another machine", e)
    pre = draft.buffers[pre_buffer_id(e.resource)]
    if e.job not in pre.slots:
        raise InvalidTransition("job not in pre-buffer", e)
    if pre.order == FIFO and pre.slots[0] != e.job:
        raise InvalidTransition("fifo buffer: job is not the oldest", e)
    if not draft.buffers[post_buffer_id(e.resource)].has_room():
        raise InvalidTransition("post-buffer full", e)

    draft.record_event(e)
    draft.take(pre.id, e.job, e.priority, actor=e.resource)
    # zero-length setup; the setup plug-in switches to SETUP when a rule applies
    draft.update_machine(e.resource, mode=WORKING, current_job=e.job, busy_until=draft.now)
    draft.enqueue(EventKind.MACHINE_STARTED, draft.now, e.resource, e.job)
    settle_buffers(inst, draft, e.priority)


def _require_machine_phase(draft: Draft, e: Event, mode: str):
    state = draft.machines.get(e.resource)
    if state is None or state.mode != mode or state.current_job != e.job:
        raise InvalidTransition(f"machine not in {mode} with job {e.job}", e)


def _setup_finished(inst: Instance, draft: Draft, e: Event):
    _require_machine_phase(draft, e, SETUP)
    draft.record_event(e)
    draft.update_machine(e.resource, mode=WORKING)
    draft.enqueue(EventKind.MACHINE_STARTED, draft.now, e.resource, e.job)


def _machine_started(inst: Instance, draft: Draft, e: Event):
    _require_machine_phase(draft, e, WORKING)
    progress = draft.jobs[e.job]
    if len(progress.op_starts) > progress.next_op_index:
        raise InvalidTransition("operation already started", e)
    op = inst.job(e.job).ops[progress.next_op_index]
    draft.record_event(e)
    draft.update_machine(e.resource, mode=WORKING, last_job_type=inst.job(e.job).type,
                         busy_until=draft.now + op.duration)
    draft.update_job(e.job, op_starts=progress.op_starts + (draft.now,))
    draft.enqueue(EventKind.MACHINE_COMPLETED, draft.now + op.duration, e.resource, e.job)


def _machine_completed(inst: Instance, draft: Draft, e: Event):
    _require_machine_phase(draft, e, WORKING)
    post = draft.buffers[post_buffer_id(e.resource)]
    if not post.has_room():
        raise InvalidTransition("post-buffer full", e)
    progress = draft.jobs[e.job]
    next_index = progress.next_op_index + 1
    done = next_index == len(inst.job(e.job).ops)

    draft.record_event(e)
    draft.update_machine(e.resource, mode=IDLE, current_job=None, busy_until=None)
    draft.update_job(e.job, next_op_index=next_index, op_ends=progress.op_ends + (draft.now,), done=done)
    draft.put(post.id, e.job, e.priority, actor=e.resource)
    if done:
        draft.enqueue(EventKind.JOB_FINISHED, draft.now, e.resource, e.job)
    settle_buffers(inst, draft, e.priority)


def _job_finished(inst: Instance, draft: Draft, e: Event):
    if not _job_or_raise(draft, e).done:
        raise InvalidTransition("job has unfinished operations", e)
    draft.record_event(e)


# Transports

def _awaiting_buffer(draft: Draft, job: str):
    """Buffer a job can be picked up from (SOURCE or a post-buffer), else None."""
    where = draft.buffer_of(job)
    if where is None or where == SINK or not (where == SOURCE or where.endswith(".post")):
        return None
    return where


def _transport_assign(inst: Instance, draft: Draft, e: Event):
    unit = draft.transports.get(e.resource)
    if unit is None:
        raise InvalidTransition(f"unknown transport {e.resource}", e)
    if unit.mode == OUTAGE:
        raise InvalidTransition("transport in outage", e)
    progress = _job_or_raise(draft, e)
    if progress.claimed_by is not None:
        raise InvalidTransition(f"job already assigned to {progress.claimed_by}", e)
    source = _awaiting_buffer(draft, e.job)
    if source is None:
        raise InvalidTransition("job is not waiting for transport", e)
    buffer = draft.buffers[source]
    if buffer.order == FIFO and buffer.slots[0] != e.job:
        raise InvalidTransition("fifo buffer: job is not the oldest", e)
    target = destination_buffer(inst, progress)
    if not draft.buffers[target].has_room():
        raise InvalidTransition("buffer full", e)
    capacity = inst.transport(e.resource).capacity

    if unit.mode == IDLE:
        draft.record_event(e)
        draft.update_job(e.job, claimed_by=e.resource)
        draft.reserve(target, e.job)
        arrival = draft.now + inst.travel.time(unit.location, buffer.location)
        draft.update_transport(e.resource, mode=TO_PICKUP, claimed=(e.job,), pickup=source,
                               destination=target, busy_until=arrival)
        draft.enqueue(EventKind.TRANSPORT_ARRIVE_PICKUP, arrival, e.resource)
    elif unit.mode == LOADING:
        if unit.pickup != source or unit.destination != target:
            raise InvalidTransition("transport is loading for another route", e)
        if len(unit.cargo) + len(unit.claimed) >= capacity:
            raise InvalidTransition("transport capacity exceeded", e)
        draft.record_event(e)
        draft.reserve(target, e.job)
        draft.take(source, e.job, e.priority, actor=e.resource)
        loaded = draft.now + inst.transport(e.resource).load_time
        draft.update_transport(e.resource, cargo=unit.cargo + (e.job,), busy_until=loaded)
        previous = draft.find(lambda q: q.kind == EventKind.TRANSPORT_LOADED and q.resource == e.resource)
        if previous is not None:
            draft.retime(previous, loaded)
    else:
        raise InvalidTransition("transport busy", e)


def _require_transport_mode(draft: Draft, e: Event, mode: str):
    unit = draft.transports.get(e.resource)
    if unit is None or unit.mode != mode:
        raise InvalidTransition(f"transport not in {mode}", e)
    return unit


def _arrive_pickup(inst: Instance, draft: Draft, e: Event):
    unit = _require_transport_mode(draft, e, TO_PICKUP)
    draft.record_event(e)
    for job in unit.claimed:
        draft.take(unit.pickup, job, e.priority, actor=e.resource)
        draft.update_job(job, claimed_by=None)
    loaded = draft.now + inst.transport(e.resource).load_time
    draft.update_transport(e.resource, mode=LOADING, cargo=unit.cargo + unit.claimed, claimed=(),
                           location=draft.buffers[unit.pickup].location, busy_until=loaded)
    draft.enqueue(EventKind.TRANSPORT_LOADED, loaded, e.resource)


def _loaded(inst: Instance, draft: Draft, e: Event):
    unit = _require_transport_mode(draft, e, LOADING)
    draft.record_event(e)
    arrival = draft.now + inst.travel.time(unit.location, draft.buffers[unit.destination].location)
    draft.update_transport(e.resource, mode=TRANSIT, busy_until=arrival)
    draft.enqueue(EventKind.TRANSPORT_ARRIVE_DROP, arrival, e.resource)


def _arrive_drop(inst: Instance, draft: Draft, e: Event):
    unit = _require_transport_mode(draft, e, TRANSIT)
    draft.record_event(e)
    delivered = draft.now + inst.transport(e.resource).unload_time
    draft.update_transport(e.resource, mode=UNLOADING, busy_until=delivered,
                           location=draft.buffers[unit.destination].location)
    draft.enqueue(EventKind.TRANSPORT_DELIVERED, delivered, e.resource)


def _delivered(inst: Instance, draft: Draft, e: Event):
    unit = _require_transport_mode(draft, e, UNLOADING)
    draft.record_event(e)
    for job in unit.cargo:
        draft.put(unit.destination, job, e.priority, actor=e.resource)
    draft.update_transport(e.resource, mode=IDLE, cargo=(), pickup=None, destination=None,
                           busy_until=None)


# Buffers

def _buffer_put(inst: Instance, draft: Draft, e: Event):
    """Manual relocation of a waiting job into another buffer."""
    if e.resource not in draft.buffers:
        raise InvalidTransition(f"unknown buffer {e.resource}", e)
    _job_or_raise(draft, e)
    if draft.jobs[e.job].claimed_by is not None:
        raise InvalidTransition("job is assigned to a transport", e)
    origin = draft.buffer_of(e.job)
    if origin is None:
        raise InvalidTransition("job is not in a buffer", e)
    if origin == e.resource:
        raise InvalidTransition("job already in this buffer", e)
    if not draft.buffers[e.resource].has_room():
        raise InvalidTransition("buffer full", e)
    draft.take(origin, e.job, e.priority)
    draft.put(e.resource, e.job, e.priority)


def _buffer_get(inst: Instance, draft: Draft, e: Event):
    raise InvalidTransition("buffer get only happens inside a machine assignment or a pickup", e)


# Breakdowns

def _breakdown_start(inst: Instance, draft: Draft, e: Event):
    if e.resource in draft.machines:
        state, progress_kinds, update = draft.machines[e.resource], MACHINE_PROGRESS, draft.update_machine
    elif e.resource in draft.transports:
        state, progress_kinds, update = draft.transports[e.resource], TRANSPORT_PROGRESS, draft.update_transport
    else:
        raise InvalidTransition(f"unknown resource {e.resource}", e)
    if state.mode == OUTAGE:
        raise InvalidTransition("resource already in outage", e)
    draft.record_event(e)
    paused = draft.pull(lambda q: q.resource == e.resource and q.kind in progress_kinds)
    suspended = tuple((q, q.time - draft.now) for q in paused)
    update(e.resource, mode=OUTAGE, interrupted=state.mode, suspended=suspended, busy_until=None)
    logger.debug(f"{e.resource} down at {draft.now}, {len(suspended)} event(s) suspended")


def _repair_complete(inst: Instance, draft: Draft, e: Event):
    if e.resource in draft.machines:
        state, update = draft.machines[e.resource], draft.update_machine
    elif e.resource in draft.transports:
        state, update = draft.transports[e.resource], draft.update_transport
    else:
        raise InvalidTransition(f"unknown resource {e.resource}", e)
    if state.mode != OUTAGE:
        raise InvalidTransition("resource is not in outage", e)
    draft.record_event(e)
    resumed = [draft.enqueue(q.kind, draft.now + remaining, q.resource, q.job)
               for q, remaining in state.suspended]
    busy_until = max((q.time for q in resumed), default=None)
    update(e.resource, mode=state.interrupted, interrupted=None, suspended=(), busy_until=busy_until)


_HANDLERS: Dict[EventKind, Callable[[Instance, Draft, Event], None]] = {
    EventKind.MACHINE_ASSIGN: _machine_assign,
    EventKind.SETUP_FINISHED: _setup_finished,
    EventKind.MACHINE_STARTED: _machine_started,
    EventKind.MACHINE_COMPLETED: _machine_completed,
    EventKind.JOB_FINISHED: _job_finished,
    EventKind.TRANSPORT_ASSIGN: _transport_assign,
    EventKind.TRANSPORT_ARRIVE_PICKUP: _arrive_pickup,
    EventKind.TRANSPORT_LOADED: _loaded,
    EventKind.TRANSPORT_ARRIVE_DROP: _arrive_drop,
    EventKind.TRANSPORT_DELIVERED: _delivered,
    EventKind.BUFFER_PUT: _buffer_put,
    EventKind.BUFFER_GET: _buffer_get,
    EventKind.BREAKDOWN_START: _breakdown_start,
    EventKind.REPAIR_COMPLETE: _repair_complete,
}
