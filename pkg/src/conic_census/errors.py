"""Error taxonomy mapped onto distinct CLI exit codes."""


class InvalidInputError(ValueError):
    """The caller handed the engine something malformed (exit code 2)."""


class ToleranceNotMet(RuntimeError):
    """Adaptive integration ran out of budget (exit code 3).

    Carries the best estimate reached and the error bound achieved.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class EngineError(AssertionError):
    """An internal cross-check failed; a bug, not bad input (exit code 4)."""
