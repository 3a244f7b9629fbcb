"""Pairwise forces, energies, and osculating-element helpers.

The public operations work on ``BodyState`` pairs; the ``*_arrays`` variants are
the hot-path equivalents used by the integrators and accept flat numpy state.
"""

from __future__ import annotations

import math

import numpy as np

from .bodies import BodyState, ForceLaw, Vector3
from .errors import SingularityError, ValidationError
from .units import G_SI


def _pair_arrays(bodies):
    b1, b2 = bodies
    return (b1.mass, b2.mass,
            b1.position.to_array(), b2.position.to_array(),
            b1.velocity.to_array(), b2.velocity.to_array())


def grav_acceleration_arrays(r1, r2, m1, m2, law, G):
    """Gravitational accelerations on each body; drag excluded.

    The common factor is computed once so that m1*a1 + m2*a2 cancels exactly
    in floating point, keeping the integrated center of mass inertial.
    """
    d = r2 - r1
    rsq = float(d @ d)
    if rsq == 0.0:
        raise SingularityError("coincident body positions")
    r = math.sqrt(rsq)
    if law.variant == "modified_gravity" and law.alpha != 0.0:
        common = G * law.r_ref ** law.alpha / r ** (3.0 + law.alpha) * d
    else:
        # alpha = 0 takes this branch too, keeping it bit-for-bit Newtonian
        common = G / (rsq * r) * d
    return m2 * common, -m1 * common


def acceleration_arrays(r1, r2, v1, v2, m1, m2, law, G):
    """Total accelerations including any dissipative term."""
    a1, a2 = grav_acceleration_arrays(r1, r2, m1, m2, law, G)
    if law.variant == "linear_drag":
        a1 = a1 - v1 / law.tau
        a2 = a2 - v2 / law.tau
    return a1, a2


def accelerations(bodies, law: ForceLaw, G: float = G_SI):
    """Accelerations (m/s^2) of the two bodies under the given force law.

    Raises ``SingularityError`` for coincident positions and
    ``ValidationError`` for non-finite input.
    """
    m1, m2, r1, r2, v1, v2 = _pair_arrays(bodies)
    if not (np.isfinite(r1).all() and np.isfinite(r2).all()
            and np.isfinite(v1).all() and np.isfinite(v2).all()):
        raise ValidationError("non-finite body state")
    a1, a2 = acceleration_arrays(r1, r2, v1, v2, m1, m2, law, G)
    return Vector3.from_array(a1), Vector3.from_array(a2)


def potential_energy(r, m1, m2, law: ForceLaw, G: float) -> float:
    """Pair potential. For modified gravity this is the antiderivative of the
    chosen force, U = -G m1 m2 r_ref^a / ((1+a) r^(1+a)); drag runs keep the
    Newtonian potential (energy stays well defined instantaneously)."""
    if r <= 0:
        raise SingularityError("coincident body positions")
    if law.variant == "modified_gravity":
        a = law.alpha
        return -G * m1 * m2 * law.r_ref ** a / ((1.0 + a) * r ** (1.0 + a))
    return -G * m1 * m2 / r


def total_energy(bodies, law: ForceLaw, G: float = G_SI) -> float:
    """Total mechanical energy K + U in joules."""
    m1, m2, r1, r2, v1, v2 = _pair_arrays(bodies)
    k = 0.5 * m1 * float(v1 @ v1) + 0.5 * m2 * float(v2 @ v2)
    r = float(np.linalg.norm(r1 - r2))
    return k + potential_energy(r, m1, m2, law, G)


def total_energy_arrays(y, m1, m2, law, G):
    r = float(np.linalg.norm(y[0:3] - y[3:6]))
    k = 0.5 * m1 * float(y[6:9] @ y[6:9]) + 0.5 * m2 * float(y[9:12] @ y[9:12])
    return k + potential_energy(r, m1, m2, law, G)


# --- relative-orbit geometry ----------------------------------------------------


def relative_state(bodies):
    """(r_rel, v_rel) of body 1 with respect to body 2."""
    _, _, r1, r2, v1, v2 = _pair_arrays(bodies)
    return r1 - r2, v1 - v2


def specific_orbital_energy(r_rel, v_rel, mu) -> float:
    return 0.5 * float(v_rel @ v_rel) - mu / float(np.linalg.norm(r_rel))

def osculating_semi_major(r_rel, v_rel, mu) -> float:
    """Semi-major axis of the instantaneous Keplerian orbit; negative if unbound."""
    eps = specific_orbital_energy(r_rel, v_rel, mu)
    if eps == 0.0:
        raise ValidationError("parabolic orbit has no finite semi-major axis")
    return -mu / (2.0 * eps)


def osculating_period(r_rel, v_rel, mu) -> float:
    """Keplerian period from the osculating semi-major axis.

    For unbound states this returns the period of the bound analog (|a|),
    used only as a horizon scale.
    """
    a = abs(osculating_semi_major(r_rel, v_rel, mu))
    return 2.0 * math.pi * math.sqrt(a ** 3 / mu)


def kepler_period(a, mu) -> float:
    return 2.0 * math.pi * math.sqrt(a ** 3 / mu)


def bodies_from_elements(m1, m2, a, e, G=G_SI, phase="apoastron"):
    """Two bodies on a Keplerian orbit of given semi-major axis and eccentricity.

    Built in the barycentric frame with the relative separation along +x and
    the relative velocity along +y, starting at apoastron (default) or
    periastron. The barycenter sits at the origin at rest; scenario offsets
    are applied separately.
    """
    if not 0 <= e < 1:
        raise ValidationError(f"eccentricity must lie in [0, 1), got {e}")
    mtot = m1 + m2
    mu = G * mtot
    if phase == "apoastron":
        r = a * (1.0 + e)
        v = math.sqrt(mu * (1.0 - e) / (a * (1.0 + e)))
    elif phase == "periastron":
        r = a * (1.0 - e)
        v = math.sqrt(mu * (1.0 + e) / (a * (1.0 - e)))
    else:
        raise ValidationError(f"unknown phase {phase!r}")
    f1, f2 = m2 / mtot, m1 / mtot
    body1 = BodyState(m1, Vector3(f1 * r, 0.0, 0.0), Vector3(0.0, f1 * v, 0.0))
    body2 = BodyState(m2, Vector3(-f2 * r, 0.0, 0.0), Vector3(0.0, -f2 * v, 0.0))
    return body1, body2


def bodies_hyperbolic(m1, m2, r0, v_factor, angle_deg=30.0, G=G_SI):
    """Unbound pair: separation r0, relative speed v_factor x escape speed,
    velocity tilted from the separation axis by angle_deg."""
    if v_factor <= 1.0:
        raise ValidationError("v_factor must exceed 1 for an unbound state")
    mtot = m1 + m2
    mu = G * mtot
    v = v_factor * math.sqrt(2.0 * mu / r0)
    ang = math.radians(angle_deg)
    vx, vy = -v * math.cos(ang), v * math.sin(ang)
    f1, f2 = m2 / mtot, m1 / mtot
    body1 = BodyState(m1, Vector3(f1 * r0, 0.0, 0.0), Vector3(f1 * vx, f1 * vy, 0.0))
    body2 = BodyState(m2, Vector3(-f2 * r0, 0.0, 0.0), Vector3(-f2 * vx, -f2 * vy, 0.0))
    return body1, body2
