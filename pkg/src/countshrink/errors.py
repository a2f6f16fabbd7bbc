"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A distribution or model parameter is outside its domain.

    The message names the offending field.
    """


class UnsupportedFamilyError(ValueError):
    """The requested operation is undefined for this prior family."""


class ResourceLimitError(RuntimeError):
    """An input exceeds a configured resource cap (e.g. Stirling table size)."""


class NumericalError(RuntimeError):
    """A quadrature or linear-algebra step failed to reach its tolerance."""

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class ChainDivergenceError(RuntimeError):
    """A Gibbs sweep produced a non-finite state."""

    def __init__(self, sweep, parameter):
        super().__init__(
            f"non-finite value in parameter '{parameter}' after sweep {sweep}"
        )
        self.sweep = sweep
        self.parameter = parameter
