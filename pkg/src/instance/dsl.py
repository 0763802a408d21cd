"""
Instance DSL reader and writer.

Line-oriented, '#' starts a comment, keywords are case-sensitive:

    instance <name>
    job <id> [type <t>] [due <int>] [weight <real>]
      op <machine-id> <int-duration>
    machine <id> [pre <int|inf>] [post <int|inf>] [order fifo|any]
    transport <id> [capacity <int>] [load <int>] [unload <int>]
    travel <from> <to> <int>
    setup <machine-id> <from-type|NEUTRAL> <to-type> <int>
    outage <resource-id> mtbf <int> mttr <int>
    stochastic <processing|transport> <deterministic|uniform lo hi|gamma shape scale> [on <resource-id>]

Machines and transports may be declared before or after the jobs that use
them; references are resolved once the whole document is read.
"""
import logging
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from src.exceptions import (
    DSLSyntaxError, DuplicateIdError, InstanceValidationError, UnknownReferenceError,
)
from src.instance.model import (
    ANY, DETERMINISTIC, FIFO, GAMMA, PROCESSING, SINK, SOURCE, TRANSPORT, UNIFORM,
    Instance, JobSpec, MachineSpec, OperationSpec, OutageSpec, SetupRule, StochasticSpec,
    TransportSpec, TravelTimeMatrix,
)
from src.instance.validation import validate_instance

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


def tokenize_line(raw: str, line_no: int) -> List[_Token]:
    body = raw.split("#", 1)[0]
    return [_Token(m.group(), line_no, m.start() + 1) for m in _TOKEN.finditer(body)]


def _int(tok: _Token, allow_inf: bool = False) -> Optional[int]:
    if allow_inf and tok.text == "inf":
        return None
    try:
        return int(tok.text)
    except ValueError:
        expected = "integer or 'inf'" if allow_inf else "integer"
        raise DSLSyntaxError(f"expected {expected}, got '{tok.text}'", tok.line, tok.column)


def _real(tok: _Token) -> float:
    try:
        return float(tok.text)
    except ValueError:
        raise DSLSyntaxError(f"expected number, got '{tok.text}'", tok.line, tok.column)


def _options(tokens: List[_Token], keys: Dict[str, Callable[[_Token], object]]) -> Dict[str, object]:
    """Parse trailing '<key> <value>' pairs."""
    values: Dict[str, object] = {}
    i = 0
    while i < len(tokens):
        key = tokens[i]
        if key.text not in keys:
            raise DSLSyntaxError(f"unexpected '{key.text}'", key.line, key.column)
        if key.text in values:
            raise DSLSyntaxError(f"'{key.text}' given twice", key.line, key.column)
        if i + 1 >= len(tokens):
            raise DSLSyntaxError(f"'{key.text}' needs a value", key.line, key.column)
        values[key.text] = keys[key.text](tokens[i + 1])
        i += 2
    return values


def _arity(tokens: List[_Token], n: int, usage: str):
    if len(tokens) != n:
        head = tokens[0]
        column = tokens[n].column if len(tokens) > n else head.column
        raise DSLSyntaxError(f"expected '{usage}'", head.line, column)


def _order(tok: _Token) -> str:
    if tok.text not in (FIFO, ANY):
        raise DSLSyntaxError(f"order must be fifo or any, got '{tok.text}'", tok.line, tok.column)
    return tok.text


def parse_instance_dsl(text: str) -> Instance:
    """
    Parse an instance document into a validated Instance.

    Omitted sections default to unbounded buffers, no transports (zero travel),
    and no setups, outages or stochastic specs.

    Raises:
        DSLSyntaxError: malformed line (with line and column)
        UnknownReferenceError: op/setup/outage/travel refers to an undeclared id
        DuplicateIdError: job, machine or transport declared twice
        InstanceValidationError: any other invariant violation
    """
    name = "instance"
    jobs: List[dict] = []
    machines: List[MachineSpec] = []
    transports: List[TransportSpec] = []
    travel: Dict[Tuple[str, str], int] = {}
    setups: List[SetupRule] = []
    outages: List[OutageSpec] = []
    stochastic: List[StochasticSpec] = []
    # (id, line, column) of every reference to resolve at the end
    machine_refs: List[_Token] = []
    resource_refs: List[Tuple[_Token, str]] = []
    location_refs: List[_Token] = []
    declared: Dict[str, int] = {}

    def declare(tok: _Token):
        if tok.text in declared:
            raise DuplicateIdError(tok.text, tok.line)
        declared[tok.text] = tok.line

    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize_line(raw, line_no)
        if not tokens:
            continue
        head, args = tokens[0], tokens[1:]
        keyword = head.text

        if keyword == "instance":
            _arity(tokens, 2, "instance <name>")
            name = args[0].text

        elif keyword == "job":
            if not args:
                raise DSLSyntaxError("expected 'job <id> ...'", head.line, head.column)
            job_id = args[0]
            if any(job["id"] == job_id.text for job in jobs):
                raise DuplicateIdError(job_id.text, line_no)
            opts = _options(args[1:], {
                "type": lambda t: t.text,
                "due": _int,
                "weight": _real,
            })
            jobs.append({"id": job_id.text, "line": line_no, "ops": [],
                         "job_type": opts.get("type"), "due": opts.get("due"),
                         "weight": opts.get("weight", 1.0)})

        elif keyword == "op":
            _arity(tokens, 3, "op <machine-id> <int-duration>")
            if not jobs:
                raise DSLSyntaxError("'op' before any 'job'", head.line, head.column)
            duration = _int(args[1])
            jobs[-1]["ops"].append(OperationSpec(machine=args[0].text, duration=duration))
            machine_refs.append(args[0])

        elif keyword == "machine":
            if not args:
                raise DSLSyntaxError("expected 'machine <id> ...'", head.line, head.column)
            declare(args[0])
            opts = _options(args[1:], {
                "pre": lambda t: _int(t, allow_inf=True),
                "post": lambda t: _int(t, allow_inf=True),
                "order": _order,
            })
            machines.append(MachineSpec(
                id=args[0].text,
                pre_buffer_capacity=opts.get("pre"),
                post_buffer_capacity=opts.get("post"),
                buffer_order=opts.get("order", ANY),
            ))

        elif keyword == "transport":
            if not args:
                raise DSLSyntaxError("expected 'transport <id> ...'", head.line, head.column)
            declare(args[0])
            opts = _options(args[1:], {"capacity": _int, "load": _int, "unload": _int})
            transports.append(TransportSpec(
                id=args[0].text,
                capacity=opts.get("capacity", 1),
                load_time=opts.get("load", 0),
                unload_time=opts.get("unload", 0),
            ))

        elif keyword == "travel":
            _arity(tokens, 4, "travel <from> <to> <int>")
            key = (args[0].text, args[1].text)
            if key in travel:
                raise DSLSyntaxError(f"travel {key[0]} -> {key[1]} given twice",
                                     head.line, head.column)
            travel[key] = _int(args[2])
            location_refs.extend(args[:2])

        elif keyword == "setup":
            _arity(tokens, 5, "setup <machine-id> <from-type|NEUTRAL> <to-type> <int>")
            setups.append(SetupRule(machine=args[0].text, from_type=args[1].text,
                                    to_type=args[2].text, duration=_int(args[3])))
            machine_refs.append(args[0])

        elif keyword == "outage":
            _arity(tokens, 6, "outage <resource-id> mtbf <int> mttr <int>")
            opts = _options(args[1:], {"mtbf": _int, "mttr": _int})
            if set(opts) != {"mtbf", "mttr"}:
                raise DSLSyntaxError("outage needs mtbf and mttr", head.line, head.column)
            outages.append(OutageSpec(resource=args[0].text,
                                      mean_time_between_failures=opts["mtbf"],
                                      mean_time_to_repair=opts["mttr"]))
            resource_refs.append((args[0], "resource"))

        elif keyword == "stochastic":
            stochastic.append(_stochastic(head, args, resource_refs))

        else:
            raise DSLSyntaxError(f"unknown keyword '{keyword}'", head.line, head.column)

    machine_ids = {m.id for m in machines}
    transport_ids = {t.id for t in transports}
    for tok in machine_refs:
        if tok.text not in machine_ids:
            raise UnknownReferenceError(tok.text, tok.line)
    for tok, what in resource_refs:
        if tok.text not in machine_ids | transport_ids:
            raise UnknownReferenceError(tok.text, tok.line, what=what)
    for tok in location_refs:
        if tok.text not in machine_ids | {SOURCE, SINK}:
            raise UnknownReferenceError(tok.text, tok.line, what="location")

    inst = Instance(
        name=name,
        jobs=tuple(JobSpec(id=j["id"], ops=tuple(j["ops"]), job_type=j["job_type"],
                           due=j["due"], weight=j["weight"]) for j in jobs),
        machines=tuple(machines),
        transports=tuple(transports),
        travel=TravelTimeMatrix.from_mapping(travel),
        setups=tuple(setups),
        outage_specs=tuple(outages),
        stochastic_specs=tuple(stochastic),
    )
    violations = validate_instance(inst)
    if violations:
        raise InstanceValidationError(violations)
    logger.debug(f"Parsed instance {inst.name}: {len(inst.jobs)} jobs, {inst.op_count} ops")
    return inst


def _stochastic(head: _Token, args: List[_Token], resource_refs) -> StochasticSpec:
    if len(args) < 2:
        raise DSLSyntaxError("expected 'stochastic <scope> <distribution> ...'",
                             head.line, head.column)
    scope, dist = args[0], args[1]
    if scope.text not in (PROCESSING, TRANSPORT):
        raise DSLSyntaxError(f"scope must be processing or transport, got '{scope.text}'",
                             scope.line, scope.column)
    n_params = {DETERMINISTIC: 0, UNIFORM: 2, GAMMA: 2}.get(dist.text)
    if n_params is None:
        raise DSLSyntaxError(f"unknown distribution '{dist.text}'", dist.line, dist.column)
    rest = args[2:]
    if len(rest) < n_params:
        raise DSLSyntaxError(f"{dist.text} needs {n_params} parameters", dist.line, dist.column)
    params = tuple(_real(t) for t in rest[:n_params])
    rest = rest[n_params:]
    applies_to = None
    if rest:
        if rest[0].text != "on" or len(rest) != 2:
            raise DSLSyntaxError("expected 'on <resource-id>'", rest[0].line, rest[0].column)
        applies_to = rest[1].text
        resource_refs.append((rest[1], "resource"))
    return StochasticSpec(scope=scope.text, distribution=dist.text, params=params,
                          applies_to=applies_to)


def _capacity(value: Optional[int]) -> str:
    return "inf" if value is None else str(value)


def serialize_instance(inst: Instance) -> str:
    """Write an Instance back into the DSL; parse_instance_dsl() reads it back unchanged."""
    lines = [f"instance {inst.name}"]
    for machine in inst.machines:
        lines.append(f"machine {machine.id} pre {_capacity(machine.pre_buffer_capacity)} "
                     f"post {_capacity(machine.post_buffer_capacity)} order {machine.buffer_order}")
    for unit in inst.transports:
        lines.append(f"transport {unit.id} capacity {unit.capacity} "
                     f"load {unit.load_time} unload {unit.unload_time}")
    for origin, destination, ticks in inst.travel.entries:
        lines.append(f"travel {origin} {destination} {ticks}")
    for job in inst.jobs:
        header = f"job {job.id}"
        if job.job_type is not None:
            header += f" type {job.job_type}"
        if job.due is not None:
            header += f" due {job.due}"
        header += f" weight {job.weight!r}"
        lines.append(header)
        for op in job.ops:
            lines.append(f"  op {op.machine} {op.duration}")
    for rule in inst.setups:
        lines.append(f"setup {rule.machine} {rule.from_type} {rule.to_type} {rule.duration}")
    for spec in inst.outage_specs:
        lines.append(f"outage {spec.resource} mtbf {spec.mean_time_between_failures} "
                     f"mttr {spec.mean_time_to_repair}")
    for spec in inst.stochastic_specs:
        line = f"stochastic {spec.scope} {spec.distribution}"
        if spec.params:
            line += " " + " ".join(repr(float(p)) for p in spec.params)
        if spec.applies_to is not None:
            line += f" on {spec.applies_to}"
        lines.append(line)
    return "\n".join(lines) + "\n"


