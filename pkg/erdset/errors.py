"""Exception hierarchy; every error knows the exit code the command line reports."""

from typing import Any, Dict, Optional


class ErdsetError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class DomainError(ErdsetError):
    """Raised when an input is outside the mathematical domain of an operation."""

    exit_code = 3


class FormatError(DomainError):
    """Raised when a point-set or grid file cannot be parsed."""


class BoundaryUndecidable(DomainError):
    """Raised when a singular value sits on a band threshold at working precision."""


class ResourceError(ErdsetError):
    """Raised when a grid would exceed the configured cell cap."""

    exit_code = 4


class SearchExhausted(ErdsetError):
    """Raised when an index scan runs out of budget."""

    exit_code = 5


class SearchFailed(ErdsetError):
    """Raised when no stage passes the acceptance thresholds within budget."""

    exit_code = 5

    def __init__(self, message: str, statistics: Optional[Dict[str, Any]] = None):
        self.statistics = statistics or {}
        super().__init__(message)
