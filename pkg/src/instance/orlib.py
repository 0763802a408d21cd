"""
OR-Library classical job shop format.

    # optional comment lines
    <n_jobs> <n_machines>
    <machine> <duration> <machine> <duration> ...    (one line per job, 0-based machines)

Jobs are named J0..J{n-1} and machines M0..M{m-1}; every extension is off.
"""
import logging
from typing import List

from src.exceptions import InstanceValidationError, OrlibFormatError
from src.instance.model import Instance, JobSpec, MachineSpec, OperationSpec
from src.instance.validation import validate_instance

logger = logging.getLogger(__name__)


def _data_lines(text: str) -> List[str]:
    lines = []
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append(body)
    return lines


def parse_orlib(text: str, name: str = "orlib") -> Instance:
    """
    Read an OR-Library job shop instance.

    Args:
        text: File contents
        name: Instance name (usually the file stem)

    Returns:
        Classical Instance with n jobs of m operations each
    """
    lines = _data_lines(text)
    if not lines:
        raise OrlibFormatError("empty file: expected header '<jobs> <machines>'")
    header = lines[0].split()
    try:
        n_jobs, n_machines = (int(v) for v in header)
    except ValueError:
        raise OrlibFormatError(f"malformed header '{lines[0]}': expected '<jobs> <machines>'")
    if n_jobs < 1 or n_machines < 1:
        raise OrlibFormatError(f"header '{lines[0]}': counts must be positive")
    if len(lines) - 1 < n_jobs:
        raise OrlibFormatError(f"expected {n_jobs} job lines, found {len(lines) - 1}")

    jobs = []
    for index, line in enumerate(lines[1:n_jobs + 1]):
        try:
            values = [int(v) for v in line.split()]
        except ValueError:
            raise OrlibFormatError(f"job line {index + 1}: non-integer value in '{line}'")
        if len(values) != 2 * n_machines:
            raise OrlibFormatError(
                f"job line {index + 1}: expected {n_machines} pairs, found {len(values) / 2:g}"
            )
        ops = []
        for machine, duration in zip(values[0::2], values[1::2]):
            if duration < 0:
                raise OrlibFormatError(f"job line {index + 1}: negative duration {duration}")
            if not 0 <= machine < n_machines:
                raise OrlibFormatError(f"job line {index + 1}: machine index {machine} out of range")
            ops.append(OperationSpec(machine=f"M{machine}", duration=duration))
        jobs.append(JobSpec(id=f"J{index}", ops=tuple(ops)))

    inst = Instance(
        name=name,
        jobs=tuple(jobs),
        machines=tuple(MachineSpec(id=f"M{k}") for k in range(n_machines)),
    )
    violations = validate_instance(inst)
    if violations:
        raise InstanceValidationError(violations)
    logger.debug(f"Read OR-Library instance {name}: {n_jobs}x{n_machines}")
    return inst
