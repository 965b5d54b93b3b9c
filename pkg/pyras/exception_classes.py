"""Custom exceptions for the pyras package.

Defines the exceptions raised while building regions, allocating servers,
training agents and reading experiment files.
"""

from __future__ import annotations


class RasError(Exception):
    """Base exception for pyras errors.

    Indicates a general issue in the allocation simulator.
    """

    def __init__(self, message: str | None = None) -> None:
        """Initialize the base error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "An unspecified error occurred in the simulator")


class RasConfigError(RasError):
    """Exception for invalid experiment or region configuration.

    Raised when a configuration value is missing, ill-typed, or when the
    hierarchy counts cannot be laid out evenly.
    """

    def __init__(self, message: str | None = None) -> None:
        """Initialize the configuration error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Invalid experiment configuration")


class RasAllocationError(RasError):
    """Exception for allocator contract violations.

    Raised when the low-level allocator receives a rack request matrix that
    does not fit in the racks. This signals a bug, not a user error.
    """

    def __init__(self, message: str | None = None) -> None:
        """Initialize the allocation error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Rack requests exceed rack capacity")


class RasPolicyError(RasError):
    """Exception for policies that cannot produce an output."""

    def __init__(self, message: str | None = None) -> None:
        """Initialize the policy error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Policy could not produce an output")


class RasTrainingError(RasError):
    """Exception for diverging or otherwise failed agent updates."""

    def __init__(self, message: str | None = None) -> None:
        """Initialize the training error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Agent update produced a non-finite loss")


class RasOracleSizeError(RasError):
    """Exception for instances too large for exhaustive enumeration."""

    def __init__(self, message: str | None = None) -> None:
        """Initialize the oracle size error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Instance is too large for the exact solver")


class RasParserError(RasError):
    """Exception for files that cannot be parsed.

    Raised for malformed trace files, configuration files and agent
    checkpoints.
    """

    def __init__(self, message: str | None = None) -> None:
        """Initialize the parser error.

        Args:
            message: Optional error message. Uses a default if not provided.
        """
        super().__init__(message or "Failed to parse the input file")
