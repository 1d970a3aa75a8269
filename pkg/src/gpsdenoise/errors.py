"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the accepted domain."""


class FormatError(ValueError):
    """Input file does not follow the expected layout."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(ArithmeticError):
    """A computation hit a degenerate or non-finite intermediate."""


class DesignError(NumericalError):
    """The Wiener-Hopf system could not be solved to the required accuracy."""

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)


class DivergenceError(NumericalError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch}")
