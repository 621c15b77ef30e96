"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class UnsupportedOperationError(ValueError):
    """The requested operation is not defined for this input (e.g. a
    fractional-exponent term differentiated below its exponent floor)."""


class ContractError(TypeError):
    """A supplied function object does not expose the derivatives or
    structure the operation requires."""


class ProblemConstructionError(ValueError):
    """Problem data is inconsistent (e.g. initial/boundary corner mismatch)."""


class DegeneracyError(RuntimeError):
    """The Gram matrix is numerically rank deficient."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


class DivergenceError(RuntimeError):
    """The nonlinear iteration produced a non-finite value."""

    def __init__(self, iteration: int, message: str):
        super().__init__(message)
        self.iteration = iteration


class ConfigError(ValueError):
    """A run configuration or config file is invalid."""
