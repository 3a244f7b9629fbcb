"""Unit systems and unit-string conversion.

All simulation internals run in SI. A ``UnitSystem`` describes the presentation
units of a scenario: what the observation tables, prompts and expected answers
are expressed in. Conversion factors map one presentation unit to SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UnitError, ValidationError

# Physical constants (SI)
G_SI = 6.674e-11          # m^3 kg^-1 s^-2
M_SUN = 1.989e30          # kg
AU_M = 1.496e11           # m
YEAR_S = 3.15576e7        # Julian year, s
DAY_S = 86400.0           # s


@dataclass(frozen=True)
class UnitSystem:
    """Presentation units for a scenario.

    ``length_m``, ``time_s`` and ``mass_kg`` are the SI sizes of one
    presentation unit; ``G`` is the gravitational constant expressed in these
    units. Consistency of ``G`` with the three factors is validated to 0.1%.
    """

    name: str
    length_m: float
    time_s: float
    mass_kg: float
    G: float
    length_name: str = "m"
    time_name: str = "s"
    mass_name: str = "kg"

    def __post_init__(self):
        for label, value in (("length_m", self.length_m),
                             ("time_s", self.time_s),
                             ("mass_kg", self.mass_kg)):
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{label} must be a positive finite factor")
        g_si = self.G * self.length_m ** 3 / (self.mass_kg * self.time_s ** 2)
        if abs(g_si - G_SI) > 1e-3 * G_SI:
            raise ValidationError(
                f"unit system {self.name!r}: G={self.G} converts to {g_si:.6e} SI, "
                f"inconsistent with {G_SI:.6e}")

    @classmethod
    def derive(cls, name, length_m, time_s, mass_kg,
               length_name="m", time_name="s", mass_name="kg"):
        """Build a system with G computed from the three conversion factors."""
        g = G_SI * mass_kg * time_s ** 2 / length_m ** 3
        return cls(name, length_m, time_s, mass_kg, g,
                   length_name, time_name, mass_name)

    # scalar converters, SI -> presentation units
    def length_from_si(self, x):
        return x / self.length_m

    def time_from_si(self, t):
        return t / self.time_s

    def mass_from_si(self, m):
        return m / self.mass_kg

    def speed_from_si(self, v):
        return v * self.time_s / self.length_m

    def energy_from_si(self, e):
        return e * self.time_s ** 2 / (self.mass_kg * self.length_m ** 2)

    def energy_to_si(self, e):
        return e * self.mass_kg * self.length_m ** 2 / self.time_s ** 2

    def time_to_si(self, t):
        return t * self.time_s

    @property
    def speed_name(self):
        return f"{self.length_name}/{self.time_name}"


SI = UnitSystem("si", 1.0, 1.0, 1.0, G_SI)
AU_YR_MSUN = UnitSystem.derive("au-yr-msun", AU_M, YEAR_S, M_SUN,
                               length_name="AU", time_name="yr", mass_name="Msun")
CGS = UnitSystem.derive("cgs", 1e-2, 1.0, 1e-3,
                        length_name="cm", time_name="s", mass_name="g")

UNIT_SYSTEMS = {u.name: u for u in (SI, AU_YR_MSUN, CGS)}


# --- unit-string registry -----------------------------------------------------
#
# Maps a unit token to (dimension, factor to the SI unit of that dimension).
# Compound speed units ("km/s") are parsed as length/time.

_UNIT_TABLE = {
    # length
    "m": ("length", 1.0),
    "km": ("length", 1e3),
    "cm": ("length", 1e-2),
    "AU": ("length", AU_M),
    "au": ("length", AU_M),
    # time
    "s": ("time", 1.0),
    "sec": ("time", 1.0),
    "min": ("time", 60.0),
    "hr": ("time", 3600.0),
    "day": ("time", DAY_S),
    "yr": ("time", YEAR_S),
    # mass
    "kg": ("mass", 1.0),
    "g": ("mass", 1e-3),
    "Msun": ("mass", M_SUN),
    "msun": ("mass", M_SUN),
    # energy
    "J": ("energy", 1.0),
    "erg": ("energy", 1e-7),
    # dimensionless
    "": ("dimensionless", 1.0),
    "dimensionless": ("dimensionless", 1.0),
}

_LONG_NAMES = {
    "m": "meters", "km": "kilometers", "cm": "centimeters",
    "AU": "astronomical units", "s": "seconds", "yr": "years",
    "day": "days", "kg": "kilograms", "g": "grams", "Msun": "solar masses",
}


def long_unit_name(unit):
    return _LONG_NAMES.get(unit, unit)


def unit_dimension(units):
    """Dimension of a unit string; raises UnitError for unknown units."""
    units = (units or "").strip()
    if "/" in units:
        num, _, den = units.partition("/")
        nd = unit_dimension(num)
        dd = unit_dimension(den)
        if nd == "length" and dd == "time":
            return "speed"
        raise UnitError(f"unsupported compound unit {units!r}")
    if units not in _UNIT_TABLE:
        raise UnitError(f"unknown unit {units!r}")
    return _UNIT_TABLE[units][0]


def si_factor(units):
    """Factor converting one `units` to the SI unit of its dimension."""
    units = (units or "").strip()
    if "/" in units:
        num, _, den = units.partition("/")
        if unit_dimension(units) == "speed":
            return si_factor(num) / si_factor(den)
    if units not in _UNIT_TABLE:
        raise UnitError(f"unknown unit {units!r}")
    return _UNIT_TABLE[units][1]


def convert_value(value, from_units, to_units):
    """Convert `value` between two unit strings of the same dimension."""
    fd = unit_dimension(from_units)
    td = unit_dimension(to_units)
    if fd != td:
        raise UnitError(f"cannot convert {from_units!r} ({fd}) to {to_units!r} ({td})")
    return value * si_factor(from_units) / si_factor(to_units)


def quantity_unit(quantity, unit_system):
    """Answer-unit string for a task quantity under a scenario's unit system."""
    if quantity == "time":
        return unit_system.time_name
    if quantity == "length":
        return unit_system.length_name
    if quantity == "mass":
        return unit_system.mass_name
    if quantity == "speed":
        return unit_system.speed_name
    if quantity == "energy":
        return "J"
    if quantity in ("dimensionless", "boolean"):
        return ""
    raise UnitError(f"unknown quantity {quantity!r}")
