"""Exception types shared across the package."""


class FactorizationError(ValueError):
    """A covariance matrix could not be Cholesky-factorized.

    ``pivot`` is the 1-based index of the first non-positive leading minor
    when known, else None.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class IntegrationError(RuntimeError):
    """Trajectory integration failed before reaching the requested time.

    ``last_time`` is the last time the integrator reached successfully.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time
