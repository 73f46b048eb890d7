"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class UnsupportedError(ValueError):
    """A request falls outside the regime an operation is defined for."""


class ConfigError(ValueError):
    """A run configuration failed validation.

    ``violations`` holds one human-readable message per problem found.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SolverError(RuntimeError):
    """The nonlinear solver failed to converge or produced non-finite values."""

    def __init__(self, message, step=None, residual_history=None):
        super().__init__(message)
        self.step = step
        self.residual_history = list(residual_history or [])
