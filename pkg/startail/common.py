""" Common functionality """

import enum
from fractions import Fraction
import math
import os
from pathlib import Path
import tempfile
from typing import Union, Optional, NamedTuple
import warnings

from .const import EXACT_MAX_DENOMINATOR, FLOAT_DIGITS

Prob = Union[float, Fraction]


class Error(Exception):
    """ Startail error """


class ParameterError(Error, ValueError):
    """ Error raised when an argument violates a precondition. """


class BudgetExceededError(ParameterError):
    """ Error raised when an oracle instance is beyond its search budget. """


class LemmaViolation(Error, AssertionError):
    """ A deterministic claim failed on a certified input.

    This never happens for a correct implementation. It is raised instead of
    returning a report, so that callers can not silently ignore it.
    """


class DiagnosticWarning(Warning):
    """ A diagnostic quantity left its expected window. """


class RangeWarning(DiagnosticWarning):
    """ A bound was evaluated outside the range it is stated for. """


warnings.filterwarnings("ignore", category=RangeWarning, append=True)


class Format(enum.Enum):
    """ Output format of an artifact """
    JSON = 'json'
    CSV = 'csv'
    TEXT = 'text'


class Verdict(enum.Enum):
    """ Outcome of an event certificate """
    HOLDS = 'holds'
    """ Every level is certified strictly below its threshold. """
    FAILS = 'fails'
    """ Some level has an exhibited packing at or above its threshold. """
    UNKNOWN = 'unknown'
    """ Neither could be established within the search budget. """


class Scalar(NamedTuple):
    """ Named scalar with its log and the formula it was computed from. """
    name: str
    value: float
    log_value: Optional[float]
    formula: str


def check_probability(p: Prob, name: str = "p") -> Prob:
    """ Checks that p lies in [0, 1] and returns it unchanged. """
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction)):
        raise ParameterError(f"{name} must be a number, got {p!r}")
    if not 0 <= p <= 1:
        raise ParameterError(f"{name} must lie in [0, 1], got {p!r}")
    if isinstance(p, int):
        return Fraction(p)
    return p


def check_count(value: int, name: str, minimum: int = 0) -> int:
    """ Checks a nonnegative integer argument. """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be at least {minimum}, got {value}")
    return value


def check_positive(value: float, name: str) -> float:
    """ Checks a strictly positive finite real argument. """
    if not isinstance(value, (int, float, Fraction)) or isinstance(value, bool):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    if not value > 0 or math.isinf(value):
        raise ParameterError(f"{name} must be positive and finite, got {value}")
    return value


def as_exact(p: Prob) -> Optional[Fraction]:
    """ Returns p as a small exact fraction, or None if it has none.

    Floats like 0.1 are recognized as 1/10 when the fraction with a small
    denominator converts back to exactly the same float.
    """
    if isinstance(p, Fraction):
        return p
    frac = Fraction(p).limit_denominator(EXACT_MAX_DENOMINATOR)
    if float(frac) == p:
        return frac
    return None


def comb0(total: int, chosen: int) -> int:
    """ Binomial coefficient which is zero outside 0 <= chosen <= total. """
    if total < 0 or chosen < 0 or chosen > total:
        return 0
    return math.comb(total, chosen)


def dyadic_ceil(value: float) -> int:
    """ Ceiling of a real value with a half-ulp guard.

    A value within half an ulp of an integer is treated as that integer, so
    that 2**j * D products do not round up by accident.
    """
    nearest = round(value)
    if abs(value - nearest) <= math.ulp(value) / 2:
        return int(nearest)
    return math.ceil(value)


def safe_log(value: float) -> float:
    """ Natural log that maps zero to minus infinity. """
    if value < 0:
        raise ParameterError(f"log of negative value {value}")
    if value == 0:
        return -math.inf
    return math.log(value)


def format_float(value: Optional[float]) -> str:
    """ Formats a real with 17 significant digits; None becomes empty. """
    if value is None:
        return ""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return format(float(value), f".{FLOAT_DIGITS}g")


def atomic_write(path: Union[str, Path], data: str) -> Path:
    """ Writes text to path through a temporary file and a rename. """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as tmp_file:
            tmp_file.write(data)
        os.replace(tmp_name, target)
    except BaseException:
        os.unlink(tmp_name)
        raise
    return target
