""" Run configuration

Values come from three sources in increasing priority: built-in defaults, a
flat key=value file and command-line flags. Both text sources go through the
same converters.
"""

from fractions import Fraction
import os
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Union

from .common import (
    Format, ParameterError, Prob, check_positive, check_probability,
    format_float)
from .const import ENV_OUTPUT_DIR, SEED_MASK


class Constants(NamedTuple):
    """ Constants the bounds leave unspecified.

    c scales combined exponents, d and b are the lower-bound multipliers,
    n0 is the size from which asymptotic statements are flagged as in range
    and alpha is the deviation exponent floor. All default to one.
    """
    c: float = 1.0
    d: float = 1.0
    b: float = 1.0
    n0: float = 1.0
    alpha: float = 1.0


def make_constants(**overrides: float) -> Constants:
    """ Constants with overrides, each of which must be positive. """
    for name, value in overrides.items():
        if name not in Constants._fields:
            raise ParameterError(f"Unknown constant {name!r}")
        check_positive(value, name)
    return Constants(**{name: float(val) for name, val in overrides.items()})


def parse_probability(text: str) -> Prob:
    """ Parses "a/b" as an exact fraction and anything else as a float. """
    try:
        value: Prob = Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as ex:
        raise ParameterError(f"Not a probability: {text!r}") from ex
    return check_probability(value)


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(",") if item.strip()]


def _float_list(text: str) -> List[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def _prob_list(text: str) -> List[Prob]:
    return [parse_probability(item.strip())
            for item in text.split(",") if item.strip()]


_CONVERTERS: Dict[str, Callable[[str], Any]] = {
    "n": int,
    "p": parse_probability,
    "r": int,
    "eps": float,
    "t": float,
    "threshold": float,
    "x": float,
    "D": float,
    "seed": int,
    "reps": int,
    "gamma": float,
    "beta": float,
    "xi": float,
    "workers": int,
    "estimator": str,
    "exact": lambda text: text.lower() in ("1", "true", "yes", "on"),
    "format": Format,
    "out": Path,
    "graph": Path,
    "ns": _int_list,
    "ps": _prob_list,
    "rs": _int_list,
    "epss": _float_list,
    "c": float,
    "d": float,
    "b": float,
    "n0": float,
    "alpha": float,
}

_POSITIVE = ("eps", "t", "D", "gamma", "beta", "xi", "reps", "workers")

_DEFAULTS: Dict[str, Any] = {
    "r": 2,
    "seed": 0,
    "reps": 1000,
    "xi": 0.1,
    "workers": 1,
    "estimator": "auto",
}


def parse_config_text(text: str) -> Dict[str, str]:
    """ Parses flat key=value lines; blank lines and # comments are skipped.
    """
    values: Dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"Config line {line_no} has no '='.")
        values[key.strip()] = value.strip()
    return values


def _get_output_dir(out_dir: Optional[Path]) -> Optional[Path]:
    if out_dir is not None:
        return out_dir
    env_dir = os.environ.get(ENV_OUTPUT_DIR)
    if env_dir:
        return Path(env_dir)
    return None


class RunConfig:
    """ Fully resolved parameters of a single run.

    :param values: Typed or textual values by key. Text is converted with
        the converter of its key; unknown keys are rejected.
    """

    def __init__(self, values: Mapping[str, Any]) -> None:
        resolved = dict(_DEFAULTS)
        for key, value in values.items():
            if value is None:
                continue
            if key not in _CONVERTERS:
                raise ParameterError(f"Unknown configuration key {key!r}")
            if isinstance(value, str):
                try:
                    value = _CONVERTERS[key](value)
                except ValueError as ex:
                    raise ParameterError(
                        f"Invalid value for {key}: {value!r}") from ex
            resolved[key] = value
        self._values = resolved
        self._validate()

    def _validate(self) -> None:
        for key in _POSITIVE:
            if key in self._values:
                check_positive(self._values[key], key)
        if "p" in self._values:
            check_probability(self._values["p"])
        if not 0 < self._values["xi"] < 1:
            raise ParameterError(
                f"xi must lie in (0, 1), got {self._values['xi']}")
        if not 0 <= self._values["seed"] <= SEED_MASK:
            raise ParameterError("seed must fit in 64 bits")
        self._constants = make_constants(**{
            name: self._values[name]
            for name in Constants._fields if name in self._values})

    @classmethod
    def load(
            cls,
            flags: Mapping[str, Any],
            config_path: Optional[Union[str, Path]] = None,
    ) -> 'RunConfig':
        """ Merges a config file with flags; flags win. """
        values: Dict[str, Any] = {}
        if config_path is not None:
            try:
                text = Path(config_path).read_text(encoding="utf-8")
            except OSError as ex:
                raise ParameterError(
                    f"Can not read config file {config_path}: {ex}") from ex
            values.update(parse_config_text(text))
        values.update(
            {key: val for key, val in flags.items() if val is not None})
        return cls(values)

    @property
    def constants(self) -> Constants:
        """ The unspecified constants with their overrides """
        return self._constants

    def get(self, key: str, default: Any = None) -> Any:
        """ Value of key, or default if unset. """
        return self._values.get(key, default)

    def require(self, key: str) -> Any:
        """ Value of key; a missing value is a usage error. """
        if key not in self._values:
            raise ParameterError(f"Missing required parameter --{key}")
        return self._values[key]

    def __contains__(self, key: str) -> bool:
        return key in self._values

    def output_path(self, default_name: str) -> Optional[Path]:
        """ Artifact path, or None for standard output.

        An explicit --out is used as is. Otherwise the artifact goes to
        default_name inside $STARTAIL_OUTPUT_DIR when that is set.
        """
        out = self._values.get("out")
        if out is not None:
            return Path(out)
        out_dir = _get_output_dir(None)
        if out_dir is None:
            return None
        return out_dir / default_name

    def to_text(self) -> str:
        """ key=value record of every resolved value, sorted by key. """
        lines = []
        for key in sorted(self._values):
            lines.append(f"{key}={_format_value(self._values[key])}")
        return "\n".join(lines) + "\n"


def _format_value(value: Any) -> str:
    if isinstance(value, Format):
        return value.value
    if isinstance(value, list):
        return ",".join(_format_value(item) for item in value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)
