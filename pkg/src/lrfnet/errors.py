"""Exception hierarchy shared across the package."""


class LrfNetError(Exception):
    """Base class for all library errors."""


class DegenerateRange(LrfNetError, ValueError):
    pass


class TooShort(LrfNetError, ValueError):
    pass


class LengthMismatch(LrfNetError, ValueError):
    pass


class NonPositiveInput(LrfNetError, ValueError):
    pass


class NonPositiveDenominator(LrfNetError, ValueError):
    pass


class OutOfWindow(LrfNetError, IndexError):
    pass


class EmptyData(LrfNetError, ValueError):
    pass


class DimensionMismatch(LrfNetError, ValueError):
    pass


class NonFinite(LrfNetError, FloatingPointError):
    pass


class NonFinitePrediction(LrfNetError, FloatingPointError):
    """Rolling forecast produced a NaN/Inf; ``step`` is the 1-based step index."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite prediction at step {step}")


class FormatError(LrfNetError, ValueError):
    """Malformed model file; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnknownFunction(LrfNetError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown function"


class DomainError(LrfNetError, ValueError):
    pass


class ParseError(LrfNetError, ValueError):
    def __init__(self, row, column, message):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column}: {message}")


class EmptyColumn(LrfNetError, ValueError):
    pass
