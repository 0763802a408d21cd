"""
Exact solver for small classical instances.

Depth-first branch and bound over active schedules (Giffler-Thompson
branching). Nodes are pruned with the larger of a job bound (ready time plus
remaining work) and a one-machine bound per machine (Jackson's preemptive
schedule over heads and tails). The initial upper bound is the best greedy
active schedule under SPT and MWKR priorities.
"""
import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from config.settings import EXACT_OP_LIMIT
from src.exceptions import NotClassicalError, SimulationError, SizeGuardError
from src.instance.classification import is_classical
from src.instance.model import Instance
from src.simulation.engine import advance, apply_agent_events, initial_state, is_terminal, next_event_time
from src.simulation.events import AGENT, Event, EventKind
from src.simulation.trace import Trace, episode_trace

logger = logging.getLogger(__name__)

# (job id, op index) -> start tick
Schedule = Dict[Tuple[str, int], int]


@dataclass
class ExactResult:
    makespan: int
    starts: Schedule = field(default_factory=dict)
    nodes: int = 0


def _jackson_preemptive(ops: List[Tuple[int, int, int]]) -> int:
    """Optimal preemptive one-machine value for (head, duration, tail) triples."""
    ops = sorted(ops)
    ready: List[Tuple[int, int, int]] = []
    t, i, best = 0, 0, 0
    while i < len(ops) or ready:
        if not ready:
            t = max(t, ops[i][0])
        while i < len(ops) and ops[i][0] <= t:
            head, duration, tail = ops[i]
            heapq.heappush(ready, (-tail, duration, tail))
            i += 1
        neg_tail, duration, tail = heapq.heappop(ready)
        horizon = ops[i][0] if i < len(ops) else t + duration
        run = min(duration, horizon - t)
        t += run
        if duration - run > 0:
            heapq.heappush(ready, (neg_tail, duration - run, tail))
        else:
            best = max(best, t + tail)
    return best


class _Search:
    def __init__(self, inst: Instance):
        self.jobs = [job.id for job in inst.jobs]
        self.routes = [[(op.machine, op.duration) for op in job.ops] for job in inst.jobs]
        # tails[j][k]: work after op k of job j
        self.tails = [[sum(d for _, d in route[k + 1:]) for k in range(len(route))] for route in self.routes]
        self.machines = list(inst.machine_ids)
        self.best = None
        self.best_starts: Schedule = {}
        self.nodes = 0

    def lower_bound(self, next_op, job_ready, machine_ready) -> int:
        bound = 0
        per_machine: Dict[str, List[Tuple[int, int, int]]] = {m: [] for m in self.machines}
        for j, route in enumerate(self.routes):
            head = job_ready[j]
            for k in range(next_op[j], len(route)):
                machine, duration = route[k]
                per_machine[machine].append((head, duration, self.tails[j][k]))
                head += duration
            bound = max(bound, head)
        for machine, ops in per_machine.items():
            if ops:
                released = [(max(h, machine_ready[machine]), d, q) for h, d, q in ops]
                bound = max(bound, _jackson_preemptive(released))
        return bound

    def conflict_set(self, next_op, job_ready, machine_ready):
        """Operations competing for the machine of the earliest-completing operation."""
        best_j, best_end = None, None
        for j, route in enumerate(self.routes):
            if next_op[j] >= len(route):
                continue
            machine, duration = route[next_op[j]]
            end = max(job_ready[j], machine_ready[machine]) + duration
            if best_end is None or end < best_end:
                best_j, best_end = j, end
        machine = self.routes[best_j][next_op[best_j]][0]
        conflict = []
        for j, route in enumerate(self.routes):
            if next_op[j] < len(route) and route[next_op[j]][0] == machine:
                start = max(job_ready[j], machine_ready[machine])
                if start < best_end:
                    conflict.append((start, route[next_op[j]][1], j))
        return machine, sorted(conflict)

    def greedy(self, priority) -> Tuple[int, Schedule]:
        next_op = [0] * len(self.routes)
        job_ready = [0] * len(self.routes)
        machine_ready = {m: 0 for m in self.machines}
        starts: Schedule = {}
        for _ in range(sum(len(r) for r in self.routes)):
            machine, conflict = self.conflict_set(next_op, job_ready, machine_ready)
            start, duration, j = min(conflict, key=lambda c: priority(c, next_op))
            starts[(self.jobs[j], next_op[j])] = start
            job_ready[j] = machine_ready[machine] = start + duration
            next_op[j] += 1
        return max(job_ready), starts

    def search(self, next_op, job_ready, machine_ready, starts):
        self.nodes += 1
        if all(next_op[j] >= len(route) for j, route in enumerate(self.routes)):
            value = max(job_ready)
            if value < self.best:
                self.best, self.best_starts = value, dict(starts)
                logger.debug(f"Improved upper bound {value} after {self.nodes} nodes")
            return
        if self.lower_bound(next_op, job_ready, machine_ready) >= self.best:
            return
        machine, conflict = self.conflict_set(next_op, job_ready, machine_ready)
        for start, duration, j in conflict:
            k = next_op[j]
            saved = (job_ready[j], machine_ready[machine])
            starts[(self.jobs[j], k)] = start
            job_ready[j] = machine_ready[machine] = start + duration
            next_op[j] += 1
            self.search(next_op, job_ready, machine_ready, starts)
            next_op[j] -= 1
            job_ready[j], machine_ready[machine] = saved
            del starts[(self.jobs[j], k)]


def brute_force_optimal(inst: Instance, force: bool = False, op_limit: Optional[int] = None) -> ExactResult:
    """
    Minimal makespan of a classical instance.

    Args:
        inst: Classical instance (no transports, buffers, setups, outages or noise)
        force: Ignore the size guard
        op_limit: Size guard in operations (defaults to EXACT_OP_LIMIT)

    Returns:
        ExactResult with the optimal makespan and a witness schedule

    Raises:
        NotClassicalError: instance has extensions switched on
        SizeGuardError: more operations than the guard allows and force is False
    """
    if not is_classical(inst):
        raise NotClassicalError(f"{inst.name} is {inst.classification}, the exact solver needs J || Cmax")
    limit = EXACT_OP_LIMIT if op_limit is None else op_limit
    if not force and inst.op_count > limit:
        raise SizeGuardError(f"{inst.name} has {inst.op_count} operations, guard is {limit} (use --force)")

    search = _Search(inst)
    rules = {
        "spt": lambda c, next_op: (c[1], search.jobs[c[2]]),
        "mwkr": lambda c, next_op: (-(c[1] + search.tails[c[2]][next_op[c[2]]]), search.jobs[c[2]]),
    }
    for name, rule in rules.items():
        value, starts = search.greedy(rule)
        if search.best is None or value < search.best:
            search.best, search.best_starts = value, starts
        logger.debug(f"Greedy {name} upper bound: {value}")
    search.search([0] * len(search.routes), [0] * len(search.routes),
                  {m: 0 for m in search.machines}, {})
    logger.info(f"✓ {inst.name}: optimal makespan {search.best} ({search.nodes} nodes)")
    return ExactResult(makespan=search.best, starts=search.best_starts, nodes=search.nodes)


def witness_trace(inst: Instance, starts: Schedule) -> Trace:
    """
    Replay a schedule through the simulator so that it can be validated.

    Raises:
        SimulationError: the schedule is not executable
    """
    planned = sorted((start, job, k) for (job, k), start in starts.items())
    s = initial_state(inst)
    cursor = 0
    while not is_terminal(s):
        due = []
        while cursor < len(planned) and planned[cursor][0] == s.now:
            _, job, k = planned[cursor]
            machine = inst.job(job).ops[k].machine
            due.append(Event(time=s.now, kind=EventKind.MACHINE_ASSIGN, resource=machine, job=job, origin=AGENT))
            cursor += 1
        if due:
            s, rejected = apply_agent_events(inst, s, due)
            if rejected:
                event, reason = rejected[0]
                raise SimulationError(f"witness not executable: {event}: {reason}")
        candidates = [t for t in (next_event_time(s),) if t is not None]
        if cursor < len(planned):
            candidates.append(planned[cursor][0])
        if not candidates:
            raise SimulationError(f"witness stalls at t={s.now}")
        s = advance(inst, s, min(candidates))
    return episode_trace(inst.name, s)
