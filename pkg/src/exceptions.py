"""Base exceptions shared by every PRIMEBALL module.

Each category carries the process exit code the CLI maps it to and a short
machine-parseable error class.
"""

from typing import Any, Dict


class PrimeballException(Exception):
    """Base exception for all harness errors."""

    exit_code: int = 5
    error_class: str = "internal"

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_line(self) -> str:
        """Single-line rendering used on stderr by the CLI."""
        text = self.message.replace("\n", " ")
        return f"error={self.error_class} message={text}"


class UsageException(PrimeballException):
    """Bad arguments supplied by the caller."""

    exit_code = 2
    error_class = "usage"


class ConfigurationException(PrimeballException):
    """Unreadable or invalid configuration."""

    exit_code = 3
    error_class = "config"


class PreconditionException(PrimeballException):
    """An operation's precondition does not hold for the current state."""

    exit_code = 4
    error_class = "precondition"


class InternalException(PrimeballException):
    """Unexpected failure inside the harness."""

    exit_code = 5
    error_class = "internal"
