"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size or enumeration budget.

    ``bracket`` carries a ``(lower, upper)`` interval for the requested
    quantity when one is known at the point of failure.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class CapabilityError(ValueError):
    """The supplied weight or system lacks a feature the measure needs."""
