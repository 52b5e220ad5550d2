"""Exception hierarchy shared across the package.

Validation errors derive from ValueError so callers using plain ``except
ValueError`` keep working; the CLI maps ValidationError to exit code 2 and
everything else to exit code 3.
"""


class PrefmooError(Exception):
    """Base class for all package errors."""


class ValidationError(PrefmooError, ValueError):
    """Bad user input: out-of-range parameters, malformed vectors, bad config."""

    def __init__(self, message: str, pointer: str | None = None):
        super().__init__(message)
        self.pointer = pointer


class TauBoundError(ValidationError):
    """Shrinkage factor outside the valid interval for the selected mode."""


class ConfigurationError(ValidationError):
    """Structurally valid input that violates a cross-parameter constraint."""


class LatticeSizeError(ValidationError):
    """Requested lattice too large to materialize."""


class CapabilityError(PrefmooError):
    """Operation requested outside its supported range (e.g. exact HV, m > 4)."""


class DegenerateRayError(PrefmooError):
    """Signals a zero-length pivot ray; callers map the point to itself."""
