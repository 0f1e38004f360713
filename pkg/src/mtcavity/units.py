"""Quantity-string parsing for configuration files.

Physical quantities in config files are strings like "4 meV" or
"1e-6 m"; bare JSON numbers are reserved for counts and dimensionless
values.  Each config field declares a dimension, and only units
convertible to that dimension are accepted.  Frequencies given in Hz
are converted to angular rad/s with a factor 2 pi; energies feeding an
angular-frequency field are divided by hbar.
"""

import math

from .exceptions import ConfigurationError
from .mtparams import CONSTANTS

__all__ = ["parse_quantity", "format_quantity", "DIMENSIONS"]

_EV = CONSTANTS.e_charge

# unit -> (dimension, factor to canonical SI)
_UNITS = {
    "s": ("time", 1.0),
    "Hz": ("frequency", 1.0),
    "rad/s": ("angular_frequency", 1.0),
    "m": ("length", 1.0),
    "m/s": ("speed", 1.0),
    "m3": ("volume", 1.0),
    "eV": ("energy", _EV),
    "meV": ("energy", 1e-3 * _EV),
    "J": ("energy", 1.0),
    "V/m": ("field", 1.0),
    "K": ("temperature", 1.0),
    "C*m": ("dipole", 1.0),
    "kg*m2": ("moment_of_inertia", 1.0),
}

# target dimension -> {source dimension: converter}
_CONVERSIONS = {
    "angular_frequency": {
        "angular_frequency": lambda x: x,
        "frequency": lambda x: 2.0 * math.pi * x,
        "energy": lambda x: x / CONSTANTS.hbar,
    },
    "energy": {"energy": lambda x: x},
    "time": {"time": lambda x: x},
    "length": {"length": lambda x: x},
    "speed": {"speed": lambda x: x},
    "volume": {"volume": lambda x: x},
    "field": {"field": lambda x: x},
    "temperature": {"temperature": lambda x: x},
    "dipole": {"dipole": lambda x: x},
    "moment_of_inertia": {"moment_of_inertia": lambda x: x},
}

DIMENSIONS = tuple(_CONVERSIONS)

_CANONICAL_UNIT = {
    "angular_frequency": "rad/s",
    "energy": "J",
    "time": "s",
    "length": "m",
    "speed": "m/s",
    "volume": "m3",
    "field": "V/m",
    "temperature": "K",
    "dipole": "C*m",
    "moment_of_inertia": "kg*m2",
}


def parse_quantity(text, dimension: str, key: str = "?") -> float:
    """Parse "value unit" into the canonical SI value of ``dimension``."""
    if dimension not in _CONVERSIONS:
        raise ConfigurationError(f"unknown dimension {dimension!r} for key {key!r}")
    if not isinstance(text, str):
        raise ConfigurationError(
            f"key {key!r}: physical quantities must be strings with units, "
            f"got {text!r}"
        )
    parts = text.split()
    if len(parts) != 2:
        raise ConfigurationError(
            f"key {key!r}: expected 'value unit', got {text!r}"
        )
    raw, unit = parts
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(
            f"key {key!r}: cannot parse number {raw!r}"
        ) from None
    if unit not in _UNITS:
        raise ConfigurationError(f"key {key!r}: unknown unit {unit!r} in {text!r}")
    src_dim, factor = _UNITS[unit]
    conv = _CONVERSIONS[dimension].get(src_dim)
    if conv is None:
        raise ConfigurationError(
            f"key {key!r}: unit {unit!r} is not a {dimension} unit"
        )
    return conv(value * factor)


def format_quantity(value: float, dimension: str) -> str:
    """Canonical "value unit" string that reparses to the same float."""
    return f"{value!r} {_CANONICAL_UNIT[dimension]}"
