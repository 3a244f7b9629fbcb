"""Core domain types: vectors, body states, and force laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Vector3:
    """Cartesian triple. All shipped scenarios keep z = 0 at all times."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValidationError(f"non-finite vector components: {(self.x, self.y, self.z)}")

    def to_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def magnitude(self):
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)


ZERO3 = Vector3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class BodyState:
    """Point mass with instantaneous position (m) and velocity (m/s)."""

    mass: float
    position: Vector3
    velocity: Vector3

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValidationError(f"mass must be positive and finite, got {self.mass}")


# --- force laws ----------------------------------------------------------------


@dataclass(frozen=True)
class Newtonian:
    """Inverse-square gravity."""

    variant = "newtonian"


@dataclass(frozen=True)
class ModifiedGravity:
    """Gravity with force magnitude G m1 m2 r_ref^alpha / r^(2+alpha).

    ``r_ref`` pins the separation at which the force equals the Newtonian
    value, so G keeps SI units and alpha = 0 recovers Newtonian exactly.
    Scenario builders set r_ref to the initial separation.
    """

    alpha: float
    r_ref: float = 1.0

    variant = "modified_gravity"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and -1.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha must lie in (-1, 1), got {self.alpha}")
        if not (math.isfinite(self.r_ref) and self.r_ref > 0):
            raise ValidationError(f"r_ref must be positive, got {self.r_ref}")


@dataclass(frozen=True)
class LinearDrag:
    """Newtonian gravity plus a velocity-linear drag acceleration -v/tau on each body."""

    tau: float

    variant = "linear_drag"

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValidationError(f"tau must be positive, got {self.tau}")


ForceLaw = Union[Newtonian, ModifiedGravity, LinearDrag]

NEWTONIAN = Newtonian()


def is_conservative(law: ForceLaw) -> bool:
    return law.variant != "linear_drag"


def is_inverse_square(law: ForceLaw) -> bool:
    """True when the trajectory is exactly Keplerian (no drag, no modified exponent)."""
    if law.variant == "newtonian":
        return True
    return law.variant == "modified_gravity" and law.alpha == 0.0


def force_law_to_dict(law: ForceLaw) -> dict:
    if law.variant == "newtonian":
        return {"variant": "newtonian"}
    if law.variant == "modified_gravity":
        return {"variant": "modified_gravity", "alpha": law.alpha, "r_ref_m": law.r_ref}
    return {"variant": "linear_drag", "tau_s": law.tau}


def force_law_from_dict(d: dict) -> ForceLaw:
    variant = d.get("variant")
    if variant == "newtonian":
        return Newtonian()
    if variant == "modified_gravity":
        return ModifiedGravity(alpha=float(d["alpha"]), r_ref=float(d.get("r_ref_m", 1.0)))
    if variant == "linear_drag":
        return LinearDrag(tau=float(d["tau_s"]))
    raise ValidationError(f"unknown force law variant {variant!r}")
