"""Scenario definition and structured-file round trip.

A scenario fully specifies a binary system: two body states in the barycentric
frame, a force law, barycenter offset and drift, presentation units, and the
simulation horizon. All numeric fields are stored in SI; the unit system only
governs presentation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np

from .bodies import (BodyState, ForceLaw, ModifiedGravity, Newtonian, Vector3,
                     ZERO3, force_law_from_dict, force_law_to_dict)
from .dynamics import bodies_from_elements, bodies_hyperbolic
from .errors import ValidationError
from .units import SI, UNIT_SYSTEMS, UnitSystem


@dataclass(frozen=True)
class Scenario:
    id: str
    bodies: Tuple[BodyState, BodyState]
    force_law: ForceLaw = field(default_factory=Newtonian)
    com_offset: Vector3 = ZERO3
    com_velocity: Vector3 = ZERO3
    unit_system: UnitSystem = SI
    n_orbits: int = 10
    samples_per_orbit: int = 5000

    def __post_init__(self):
        if not self.id:
            raise ValidationError("scenario id must be non-empty")
        if len(self.bodies) != 2:
            raise ValidationError("scenario requires exactly two bodies")
        if self.n_orbits < 1:
            raise ValidationError(f"n_orbits must be >= 1, got {self.n_orbits}")
        if self.samples_per_orbit < 2:
            raise ValidationError("samples_per_orbit must be >= 2")

    def initial_arrays(self):
        """Initial (positions (2,3), velocities (2,3), masses (2,)) with the
        barycenter offset and proper motion applied."""
        off = self.com_offset.to_array()
        drift = self.com_velocity.to_array()
        pos = np.array([b.position.to_array() + off for b in self.bodies])
        vel = np.array([b.velocity.to_array() + drift for b in self.bodies])
        masses = np.array([b.mass for b in self.bodies])
        return pos, vel, masses

    def total_mass(self):
        return self.bodies[0].mass + self.bodies[1].mass


def scenario_from_elements(scenario_id, m1, m2, a, e, *, law=None,
                           com_offset=ZERO3, com_velocity=ZERO3,
                           unit_system=SI, n_orbits=10, samples_per_orbit=5000,
                           phase="apoastron", G=None):
    """Scenario on a Keplerian orbit built from (m1, m2, a, e).

    For modified-gravity laws the reference separation is pinned to the
    initial separation, so alpha stays the only free parameter.
    """
    from .units import G_SI
    g = G_SI if G is None else G
    bodies = bodies_from_elements(m1, m2, a, e, G=g, phase=phase)
    if law is not None and law.variant == "modified_gravity":
        r0 = float(np.linalg.norm(bodies[0].position.to_array()
                                  - bodies[1].position.to_array()))
        law = ModifiedGravity(alpha=law.alpha, r_ref=r0)
    return Scenario(scenario_id, bodies, law or Newtonian(),
                    com_offset, com_velocity, unit_system,
                    n_orbits, samples_per_orbit)


def scenario_hyperbolic(scenario_id, m1, m2, r0, v_factor, *, angle_deg=30.0,
                        com_offset=ZERO3, com_velocity=ZERO3,
                        unit_system=SI, n_orbits=10, samples_per_orbit=5000):
    bodies = bodies_hyperbolic(m1, m2, r0, v_factor, angle_deg=angle_deg)
    return Scenario(scenario_id, bodies, Newtonian(), com_offset, com_velocity,
                    unit_system, n_orbits, samples_per_orbit)


# --- structured-file round trip ------------------------------------------------
#
# Units are declared explicitly in the field names: *_kg, *_m, *_mps, *_s.


def _vec(v: Vector3):
    return [v.x, v.y, v.z]


def scenario_to_dict(sc: Scenario) -> dict:
    u = sc.unit_system
    return {
        "id": sc.id,
        "bodies": [
            {"mass_kg": b.mass, "position_m": _vec(b.position),
             "velocity_mps": _vec(b.velocity)}
            for b in sc.bodies
        ],
        "force_law": force_law_to_dict(sc.force_law),
        "com_offset_m": _vec(sc.com_offset),
        "com_velocity_mps": _vec(sc.com_velocity),
        "unit_system": {
            "name": u.name, "length_m": u.length_m, "time_s": u.time_s,
            "mass_kg": u.mass_kg, "G": u.G, "length_name": u.length_name,
            "time_name": u.time_name, "mass_name": u.mass_name,
        },
        "n_orbits": sc.n_orbits,
        "samples_per_orbit": sc.samples_per_orbit,
    }


def scenario_from_dict(d: dict) -> Scenario:
    try:
        bodies = tuple(
            BodyState(float(b["mass_kg"]),
                      Vector3(*map(float, b["position_m"])),
                      Vector3(*map(float, b["velocity_mps"])))
            for b in d["bodies"]
        )
        us = d.get("unit_system", {"name": "si"})
        if set(us) <= {"name"} and us.get("name") in UNIT_SYSTEMS:
            unit_system = UNIT_SYSTEMS[us["name"]]
        else:
            unit_system = UnitSystem(**us)
        return Scenario(
            id=d["id"],
            bodies=bodies,
            force_law=force_law_from_dict(d.get("force_law", {"variant": "newtonian"})),
            com_offset=Vector3(*map(float, d.get("com_offset_m", (0, 0, 0)))),
            com_velocity=Vector3(*map(float, d.get("com_velocity_mps", (0, 0, 0)))),
            unit_system=unit_system,
            n_orbits=int(d.get("n_orbits", 10)),
            samples_per_orbit=int(d.get("samples_per_orbit", 5000)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scenario document: {exc}") from exc


def save_scenario(sc: Scenario, path):
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
