"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` holds the best value obtained and ``residual`` the achieved
    error measure, so callers can decide whether to use it anyway.
    """

    def __init__(self, message, estimate=None, residual=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
