"""Exception hierarchy shared by every module."""


class DesignLabError(Exception):
    """Base class for all package errors."""


class ValidationError(DesignLabError, ValueError):
    """Bad argument: wrong shape, wrong parity, unnormalized state, ..."""


class DimensionError(ValidationError):
    pass


class ParityError(ValidationError):
    pass


class NormalizationError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class CapabilityError(ValidationError):
    """Requested (family, t, d) combination is not supported."""


class BudgetError(DesignLabError):
    """Requested object would exceed the configured memory budget."""


class ConvergenceError(DesignLabError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
