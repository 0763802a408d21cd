"""
Exception hierarchy for JobShopLab.

Violations found by the validators are returned as lists; the classes here
are raised only when an operation cannot produce its result.
"""
from typing import List, Optional


class JobShopLabError(Exception):
    """Base class for every error raised by this package."""


# Instance model

class InstanceError(JobShopLabError):
    """Problem instance could not be read or is not usable."""


class DSLSyntaxError(InstanceError):
    """Malformed line in an instance or configuration document."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownReferenceError(InstanceError):
    """A document refers to an id that was never declared."""

    def __init__(self, ref: str, line: Optional[int] = None, what: str = "machine"):
        self.ref = ref
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown {what} id '{ref}'{where}")


class DuplicateIdError(InstanceError):
    """The same job, machine or transport id was declared twice."""

    def __init__(self, ident: str, line: Optional[int] = None):
        self.ident = ident
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate id '{ident}'{where}")


class OrlibFormatError(InstanceError):
    """Malformed OR-Library job shop file."""


class InstanceValidationError(InstanceError):
    """Instance violates one or more invariants."""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


# Configuration

class ConfigError(JobShopLabError):
    """Unknown factory or plug-in, duplicate plug-in, or bad parameter."""


# Simulation

class SimulationError(JobShopLabError):
    """Raised by the state machine."""


class InvalidTransition(SimulationError):
    """An event is not valid in the current state."""

    def __init__(self, reason: str, event=None):
        self.reason = reason
        self.event = event
        super().__init__(reason if event is None else f"{reason}: {event}")


class DeadlockError(SimulationError):
    """Jobs remain but nothing is enabled and nothing is queued."""


class EpisodeFinishedError(SimulationError):
    """step() called on a terminal episode."""


class StepBudgetExceeded(SimulationError):
    """An episode needed more agent steps than its budget allows."""


# Benchmark harness

class SizeGuardError(JobShopLabError):
    """Instance too large for the exact solver without --force."""


class NotClassicalError(JobShopLabError):
    """Operation requires a classical J||Cmax instance."""


class TraceValidationError(JobShopLabError):
    """A benchmark trace failed validation."""

    def __init__(self, violations, trace=None, label: str = ""):
        self.violations = list(violations)
        self.trace = trace
        self.label = label
        head = f"{label}: " if label else ""
        super().__init__(f"{head}{len(self.violations)} violation(s), first: {self.violations[0] if self.violations else '-'}")
