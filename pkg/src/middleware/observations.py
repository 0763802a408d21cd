"""
Observation factory.
"""
from typing import List, Optional

import numpy as np

from src.instance.model import Instance
from src.simulation.engine import enabled_actions
from src.simulation.events import CandidateAction
from src.simulation.state import IDLE, SimState

OBSERVATION_SIZE = 7


def current_candidate(inst: Instance, s: SimState, pointer: int = 0) -> Optional[CandidateAction]:
    candidates = enabled_actions(inst, s)
    if not candidates:
        return None
    return candidates[pointer % len(candidates)]


def _remaining_work(inst: Instance, s: SimState, job_id: str) -> int:
    progress = s.jobs[job_id]
    return sum(op.duration for op in inst.job(job_id).ops[progress.next_op_index:])


def observe_simple(inst: Instance, s: SimState, pointer: int = 0) -> np.ndarray:
    """
    Seven features in [0, 1]:

        now / horizon, fraction of operations done, candidate duration / longest
        duration, idle fraction of the candidate's machine, candidate job's
        remaining work / its total work, fraction of idle machines, occupancy
        of bounded buffers.

    Candidate features are 0 when nothing is enabled.
    """
    total_ops = inst.op_count
    done_ops = sum(p.next_op_index for p in s.jobs.values())
    longest = max(op.duration for job in inst.jobs for op in job.ops)

    duration = idle_fraction = remaining = 0.0
    candidate = current_candidate(inst, s, pointer)
    if candidate is not None:
        progress = s.jobs[candidate.job]
        job = inst.job(candidate.job)
        if not progress.done:
            op = job.ops[progress.next_op_index]
            duration = op.duration / longest
            machine = s.machines[op.machine]
            idle_fraction = machine.ticks_in(IDLE, s.now) / s.now if s.now > 0 else 1.0
            remaining = _remaining_work(inst, s, candidate.job) / job.total_work

    idle_machines = sum(1 for m in s.machines.values() if m.mode == IDLE) / max(1, len(s.machines))

    bounded = [b for b in s.buffers.values() if b.capacity is not None]
    capacity = sum(b.capacity for b in bounded)
    occupancy = sum(len(b.slots) for b in bounded) / capacity if capacity else 0.0

    features: List[float] = [
        s.now / s.horizon,
        done_ops / total_ops,
        duration,
        idle_fraction,
        remaining,
        idle_machines,
        occupancy,
    ]
    return np.clip(np.asarray(features, dtype=np.float64), 0.0, 1.0)


OBSERVATION_FACTORIES = {"simple": observe_simple}
