"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's precondition."""


class IntegrationFailure(RuntimeError):
    """The time stepper produced non-finite values."""

    def __init__(self, time: float, message: str = ""):
        self.time = float(time)
        super().__init__(message or f"non-finite state at t = {self.time:.6g}")


class ResolutionWarning(UserWarning):
    """A high-derivative functional was evaluated on an under-resolved field."""
