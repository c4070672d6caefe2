"""Exception types shared across the package."""


class InvalidPotentialError(ValueError):
    """The polynomial potential violates integrability or parity requirements."""


class IntegrationFailureError(RuntimeError):
    """An adaptive quadrature did not converge within its node budget."""


class PrecisionFailureError(RuntimeError):
    """A moment-based recurrence computation lost positivity.

    `index` is the first recurrence index at which positivity broke down.
    """

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class SolverConsistencyError(RuntimeError):
    """A linear solve violated its residual contract (internal inconsistency)."""


class ConfigError(ValueError):
    """A run configuration failed validation."""
