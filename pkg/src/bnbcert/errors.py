"""Shared exception types."""


class ProblemFormatError(ValueError):
    """Raised on malformed problem data or JSON schema violations."""


class SolverError(RuntimeError):
    """Raised when a relaxation cannot be handled (e.g. unbounded)."""


class CertificationError(RuntimeError):
    """Raised when certification exceeds its region budget or breaks down."""


class ConfigError(ValueError):
    """Raised on unsupported solver/certifier configuration combinations."""
