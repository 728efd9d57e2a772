"""Exception types raised by the simulator."""


class CorroddError(Exception):
    """Base class for all simulator errors."""


class NonFiniteParameterError(CorroddError, ValueError):
    """A model parameter is NaN or infinite."""


class InadmissibleParamsError(CorroddError, ValueError):
    """Parameters violate one of the standing hypotheses."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ExponentOverflowError(CorroddError, OverflowError):
    """An exponential argument exceeds the overflow guard."""

    def __init__(self, argument):
        super().__init__(f"exponential argument {argument!r} exceeds guard |x| <= 700")
        self.argument = argument


class ZeroPivotError(CorroddError, ZeroDivisionError):
    def __init__(self, row):
        super().__init__(f"zero pivot in tridiagonal elimination at row {row}")
        self.row = row


class InitialDataError(CorroddError, ValueError):
    """Initial densities are outside the admissible box."""


class TimeStepError(CorroddError, ValueError):
    """Time step is non-positive or exceeds the stability bound."""


class BoundViolationError(CorroddError):
    """A density left [0, u_max] by more than the tolerance."""

    def __init__(self, message, state=None, record=None):
        super().__init__(message)
        self.state = state
        self.record = record


class ConfigError(CorroddError, ValueError):
    """Configuration file could not be parsed or validated."""
