"""Shared exception types."""


class InstanceParseError(ValueError):
    """Raised when an instance file cannot be parsed; message carries the line number."""


class MetricValidationError(ValueError):
    """Raised when a distance matrix fails symmetry, diagonal, sign, or triangle checks."""


class EnumerationCapError(RuntimeError):
    """Raised when an exact enumeration would exceed its configured cap."""


class BudgetExceededError(RuntimeError):
    """Raised when a search would evaluate more candidate vectors than its budget allows."""
