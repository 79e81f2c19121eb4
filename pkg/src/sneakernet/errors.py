"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input is well-formed but outside the model's valid domain."""


class InfeasibleError(DomainError):
    """No configuration within the search bounds meets the target."""


class FitError(DomainError):
    """Not enough usable data to fit the failure model."""


class DeadlockError(RuntimeError):
    """The event simulation ran out of enabled events before its horizon."""
