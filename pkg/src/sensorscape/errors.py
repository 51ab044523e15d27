"""Exception types raised across the package."""


class SensorscapeError(Exception):
    pass


class NumericalDivergence(SensorscapeError, ArithmeticError):
    """A simulated state component became non-finite."""

    def __init__(self, message, **context):
        self.context = context
        if context:
            details = ", ".join(f"{k}={v!r}" for k, v in context.items())
            message = f"{message} ({details})"
        super().__init__(message)


class InvalidRadius(SensorscapeError, ValueError):
    pass


class DimensionMismatch(SensorscapeError, ValueError):
    pass


class ChecksumMismatch(SensorscapeError):
    """Resume attempted with a configuration that differs from the manifest."""


class MissingMatrixDump(SensorscapeError, FileNotFoundError):
    pass
