"""
Exception types shared across nashgraph modules.

The CLI maps these to exit codes:
- BudgetExceededError -> 2
- everything else -> 1
"""
from typing import Optional


class NashGraphError(Exception):
    """Base class for all nashgraph errors."""
    pass


class GraphFormatError(NashGraphError):
    """Raised when a graph text file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CnfFormatError(NashGraphError):
    """Raised when DIMACS CNF text cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(NashGraphError, ValueError):
    """Raised when an operation is called outside its precondition."""
    pass


class BudgetExceededError(NashGraphError):
    """Raised when an exponential procedure would exceed its configured cap."""

    def __init__(self, budget: str, limit, actual=None):
        self.budget = budget
        self.limit = limit
        self.actual = actual
        detail = f" (needed {actual})" if actual is not None else ""
        super().__init__(f"{budget} budget of {limit} exceeded{detail}")


class ConfigError(NashGraphError):
    """Raised when a settings file is unreadable or invalid."""
    pass


class ReportFormatError(NashGraphError):
    """Raised when a saved JSON report cannot be loaded."""
    pass


class UsageError(NashGraphError):
    """Raised for malformed command-line arguments."""
    pass
