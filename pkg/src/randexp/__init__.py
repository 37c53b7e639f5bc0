"""Numerical laboratory for non-autonomous iteration of lambda * exp(z)."""

from . import _backend
from .errors import (
    ConeExitError,
    ConstructionError,
    CriterionError,
    DomainError,
    InvalidParameterError,
    OrbitOverflowError,
    PoleError,
    RandExpError,
    ScheduleError,
    UndefinedIndexError,
)
from .orbit import EscapeConfig, OrbitState, Status, run, step
from .seq import (
    Kind,
    ParameterSequence,
    block_repeat_seq,
    borel_random_seq,
    constant_seq,
    critical_exact_seq,
    from_spec,
    load_sequence,
    power_law_seq,
    uniform_random_seq,
)

BACKEND = _backend.NAME

__version__ = "0.1.0"


def adaptive_escape_seq(*args, **kwargs):
    from .adaptive import adaptive_escape_seq as build

    return build(*args, **kwargs)
