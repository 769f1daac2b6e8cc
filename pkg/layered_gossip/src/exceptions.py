"""Exception types raised across layered_gossip.

Every error derives from a built-in exception so callers can catch broadly
(``ValueError`` for bad input, ``OSError`` for output failures).
"""

from pathlib import Path


class InvalidInputError(ValueError):
    """Raised when a pure operation receives arguments outside its domain.

    Attributes:
        field: Name of the offending parameter when one can be named.
    """

    def __init__(self, message: str, field: str | None = None) -> None:
        """Initialize with a message and optionally the offending parameter.

        Args:
            message: Human readable description.
            field: Name of the offending parameter.
        """
        self.field = field
        super().__init__(message)


class ProtocolViolationError(ValueError):
    """Raised when a gossip message is malformed for its kind."""


class ConfigurationError(ValueError):
    """Raised when a scenario is missing, unparsable or violates a constraint.

    Attributes:
        field: Dotted path of the offending field (e.g. ``protocol.beta``).
    """

    def __init__(self, field: str, problem: str) -> None:
        """Initialize with the field path and a description of the problem.

        Args:
            field: Dotted path of the offending field.
            problem: Human readable description.
        """
        self.field = field
        super().__init__(f"{field}: {problem}")


class ReportWriteError(OSError):
    """Raised when a report, trace or snapshot file cannot be written.

    Attributes:
        path: File that could not be written.
    """

    def __init__(self, path: Path, reason: str) -> None:
        """Initialize with the path and the underlying reason.

        Args:
            path: File that could not be written.
            reason: Underlying error text.
        """
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
