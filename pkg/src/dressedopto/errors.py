"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    pass


class NotFound(LookupError):
    pass


class NumericalError(ArithmeticError):
    pass


class IntegrationUnstable(NumericalError):
    """Raised when a propagated state drifts outside physical tolerances.

    ``diagnostics`` holds the time, trace drift and minimum eigenvalue at
    the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
