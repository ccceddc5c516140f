"""Exception hierarchy. CLI exit codes hang off these classes."""


class HyprojError(Exception):
    exit_code = 1


class UsageError(HyprojError, ValueError):
    """Invalid arguments: bad dimensions, points outside the ball, etc."""

    exit_code = 2


class NumericalError(HyprojError, ArithmeticError):
    """A numerical routine failed to meet its contract."""

    exit_code = 3

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        msg = super().__str__()
        if self.diagnostics:
            extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
            msg = f"{msg} ({extra})"
        return msg


class InsufficientScalesError(NumericalError):
    """Fewer than three box-counting scales survived the usable-scale filter."""
