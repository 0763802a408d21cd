"""
Gantt export: per-resource intervals rebuilt from trace records.

    {"instance": name, "makespan": int,
     "resources": [{"id": r, "intervals": [{job, op, start, end, kind}, ...]}, ...]}

kind is one of working, setup, outage, travel, load, unload. Outage windows
are cut out of the activity they interrupt, so a resource's intervals never
overlap.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from src.simulation.trace import Trace

logger = logging.getLogger(__name__)

# record opening an activity -> interval kind; the next phase record of the resource closes it
_PHASES = {
    "MachineAssign": "setup",
    "SetupFinished": "setup",
    "MachineStarted": "working",
    "TransportAssign": "travel",
    "TransportArrivePickup": "load",
    "TransportLoaded": "travel",
    "TransportArriveDrop": "unload",
}
_CLOSING = ("MachineCompleted", "TransportDelivered")
_MACHINE_KINDS = ("MachineAssign", "SetupFinished", "MachineStarted", "MachineCompleted")


def _cut(start: int, end: int, outages: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Parts of [start, end) outside every outage window."""
    pieces = [(start, end)]
    for down, up in outages:
        remaining = []
        for a, b in pieces:
            if up <= a or down >= b:
                remaining.append((a, b))
                continue
            if a < down:
                remaining.append((a, down))
            if up < b:
                remaining.append((up, b))
        pieces = remaining
    return [(a, b) for a, b in pieces if b > a]


def _outage_windows(trace: Trace) -> Dict[str, List[Tuple[int, int]]]:
    windows: Dict[str, List[Tuple[int, int]]] = {}
    down: Dict[str, int] = {}
    for record in trace.records:
        if record.kind == "BreakdownStart":
            down[record.resource] = record.t
        elif record.kind == "RepairComplete" and record.resource in down:
            windows.setdefault(record.resource, []).append((down.pop(record.resource), record.t))
    end_of_trace = trace.records[-1].t if trace.records else 0
    for resource, t in down.items():
        windows.setdefault(resource, []).append((t, end_of_trace))
    return windows


def export_gantt(trace: Trace) -> Dict[str, Any]:
    """Build the Gantt document of a trace (an empty trace gives no resources)."""
    outages = _outage_windows(trace)
    completed: Dict[str, int] = {}
    carrying: Dict[str, Optional[str]] = {}
    # resource -> (kind, start, job, op)
    active: Dict[str, Tuple[str, int, Optional[str], Optional[int]]] = {}
    intervals: Dict[str, List[Dict[str, Any]]] = {}
    machines = set()

    def close(resource: str, end: int):
        kind, start, job, op = active.pop(resource)
        for a, b in _cut(start, end, outages.get(resource, [])):
            intervals.setdefault(resource, []).append({"job": job, "op": op, "start": a, "end": b, "kind": kind})

    for record in trace.records:
        resource = record.resource
        if record.kind in _MACHINE_KINDS:
            machines.add(resource)
        if record.kind not in _PHASES and record.kind not in _CLOSING:
            continue
        # extra loads while loading keep the load interval open
        if record.kind == "TransportAssign" and active.get(resource, ("",))[0] == "load":
            continue
        if resource in active:
            close(resource, record.t)
        if record.kind == "MachineCompleted" and record.job:
            completed[record.job] = completed.get(record.job, 0) + 1
        if record.kind in _PHASES:
            if record.job is not None:
                carrying[resource] = record.job
            job = carrying.get(resource)
            op = completed.get(job, 0) if job is not None else None
            active[resource] = (_PHASES[record.kind], record.t, job, op)

    for resource, windows in outages.items():
        for down, up in windows:
            if up > down:
                intervals.setdefault(resource, []).append(
                    {"job": None, "op": None, "start": down, "end": up, "kind": "outage"})

    ordered = sorted(r for r in intervals if r in machines) + sorted(r for r in intervals if r not in machines)
    resources = [{"id": r, "intervals": sorted(intervals[r], key=lambda i: (i["start"], i["end"]))}
                 for r in ordered]

    makespan = trace.summary.get("makespan")
    if makespan is None:
        makespan = max((r.t for r in trace.records if r.kind == "MachineCompleted"), default=0)
    return {"instance": trace.instance, "makespan": makespan, "resources": resources}


def write_gantt(trace: Trace, path: Union[str, Path]) -> Dict[str, Any]:
    document = export_gantt(trace)
    Path(path).write_text(json.dumps(document, indent=1, sort_keys=True), encoding="utf-8")
    logger.info(f"✓ Gantt with {len(document['resources'])} resources written to {path}")
    return document
