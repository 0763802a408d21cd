"""
Trace export.

JSON layout:
    {"instance": name, "records": [{t, kind, resource, job, priority, origin, round, actor}, ...],
     "summary": {"makespan": int|null, "machines": {id: {busy, idle, setup, outage}}, "plugins": {...}}}
"""
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from src.simulation.engine import is_terminal, makespan
from src.simulation.state import IDLE, OUTAGE, SETUP, WORKING, SimState, TraceRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trace:
    instance: str
    records: Tuple[TraceRecord, ...]
    summary: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def of_kind(self, kind: str) -> Tuple[TraceRecord, ...]:
        return tuple(r for r in self.records if r.kind == kind)


def _plain(value):
    """JSON-friendly copy of plug-in outputs (fractions become floats)."""
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "to_dict"):
        return _plain(value.to_dict())
    return value


def summarize(s: SimState) -> Dict[str, Any]:
    machines = {}
    for machine_id in sorted(s.machines):
        state = s.machines[machine_id]
        machines[machine_id] = {
            "busy": state.ticks_in(WORKING, s.now),
            "idle": state.ticks_in(IDLE, s.now),
            "setup": state.ticks_in(SETUP, s.now),
            "outage": state.ticks_in(OUTAGE, s.now),
        }
    return {
        "makespan": makespan(s) if is_terminal(s) else None,
        "machines": machines,
        "plugins": dict(s.aux),
    }


def episode_trace(instance_name: str, s: SimState) -> Trace:
    return Trace(instance=instance_name, records=s.trace, summary=summarize(s))


def trace_to_dict(trace: Trace) -> Dict[str, Any]:
    return {
        "instance": trace.instance,
        "records": [r.to_dict() for r in trace.records],
        "summary": _plain(trace.summary),
    }


def trace_to_json(trace: Trace, path: Optional[Union[str, Path]] = None) -> str:
    text = json.dumps(trace_to_dict(trace), indent=1, sort_keys=True)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug(f"Wrote trace with {len(trace)} records to {path}")
    return text


def trace_from_dict(data: Dict[str, Any]) -> Trace:
    records = tuple(
        TraceRecord(t=int(r["t"]), kind=r["kind"], resource=r["resource"], job=r.get("job"),
                    priority=float(r.get("priority", 0.0)), origin=r.get("origin", "auto"),
                    round=int(r.get("round", 0)), actor=r.get("actor"))
        for r in data.get("records", [])
    )
    return Trace(instance=data.get("instance", ""), records=records, summary=data.get("summary", {}))


def trace_from_json(text_or_path: Union[str, Path]) -> Trace:
    """Read a trace from a JSON string or a file path."""
    if isinstance(text_or_path, Path) or not str(text_or_path).lstrip().startswith("{"):
        text = Path(text_or_path).read_text(encoding="utf-8")
    else:
        text = text_or_path
    return trace_from_dict(json.loads(text))
