"""Exception hierarchy shared by all modules."""


class RandExpError(Exception):
    """Base class for errors raised by randexp."""


class InvalidParameterError(RandExpError, ValueError):
    """A generator, config or experiment received an out-of-range parameter."""


class UndefinedIndexError(RandExpError, IndexError):
    """A sequence was queried at an index where it is not defined."""


class DomainError(RandExpError, ValueError):
    """A point lies outside the domain of a geometric function."""


class PoleError(DomainError):
    """Evaluation hit a pole of a meromorphic map."""


class OrbitOverflowError(RandExpError, OverflowError):
    """Re(z) exceeded the overflow guard before a step."""


class ConstructionError(RandExpError, RuntimeError):
    """The adaptive sequence construction left its tracked region."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class CriterionError(RandExpError, RuntimeError):
    """A numerically chosen constant could not be certified."""


class ScheduleError(RandExpError, RuntimeError):
    """A constant schedule fails its own defining requirement."""


class ConeExitError(DomainError):
    """An orbit expected to stay in a cone left it."""
