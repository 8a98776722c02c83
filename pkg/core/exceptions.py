"""
Exception hierarchy for the planning engine.

Validation findings are returned as data (see core.validation); these
exceptions are reserved for conditions that stop a run.
"""
from typing import Optional


class PlanningError(Exception):
    """Base class for all engine errors"""


class ConfigError(PlanningError):
    """Run configuration is missing, unreadable or malformed"""


class DataError(PlanningError):
    """Input dataset cannot be parsed

    Args:
        message: Human readable description
        path: Offending file, when known
        row: 1-based line number in the file, when known
    """

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        location = ''
        if path:
            location = f" [{path}" + (f", line {row}" if row is not None else '') + "]"
        super().__init__(f"{message}{location}")


class ParameterError(PlanningError):
    """A technology or policy parameter is outside its admissible range"""


class BuildError(PlanningError):
    """The planning problem cannot be assembled from the given inputs"""


class SolverError(PlanningError):
    """The LP solver hit an unrecoverable numerical condition"""
