"""Exact two-body propagation via Gauss f and g functions in universal variables.

For a pure inverse-square law the two-body problem has a closed-form time
advance: the barycenter moves inertially and the relative orbit is Keplerian.
Stepping with this propagator conserves energy and momentum to roundoff at any
step size, handles elliptic, parabolic, hyperbolic and rectilinear states, and
is exactly time-reversible. This is the fixed-step scheme used for all purely
Newtonian runs.
"""

from __future__ import annotations

import math

import numpy as np

from .bodies import BodyState, ForceLaw, Vector3, is_inverse_square
from .errors import ContractViolationError, SingularityError, ValidationError
from .units import G_SI

_STUMPFF_SERIES_CUTOFF = 1e-5


def stumpff(z):
    """Stumpff functions C(z), S(z) with a series branch near z = 0."""
    if abs(z) < _STUMPFF_SERIES_CUTOFF:
        c = 1.0 / 2 - z / 24 + z * z / 720 - z ** 3 / 40320
        s = 1.0 / 6 - z / 120 + z * z / 5040 - z ** 3 / 362880
        return c, s
    if z > 0:
        sz = math.sqrt(z)
        return (1.0 - math.cos(sz)) / z, (sz - math.sin(sz)) / (sz * z)
    sz = math.sqrt(-z)
    return (math.cosh(sz) - 1.0) / (-z), (math.sinh(sz) - sz) / (sz * -z)


def propagate_relative(r0v, v0v, mu, dt, max_iter=80):
    """Advance a two-body relative state (r0v, v0v) by dt seconds.

    Solves the universal Kepler equation with Newton iteration and applies the
    f and g functions. dt may be negative (time reversal).
    """
    r0 = float(np.linalg.norm(r0v))
    if r0 == 0.0:
        raise SingularityError("coincident body positions")
    smu = math.sqrt(mu)
    vr0 = float(r0v @ v0v) / r0
    alpha = 2.0 / r0 - float(v0v @ v0v) / mu

    if alpha > 1e-30:
        chi = smu * alpha * dt
    else:
        chi = smu * dt / r0
    dchi_prev = math.inf
    for _ in range(max_iter):
        z = alpha * chi * chi
        c, s = stumpff(z)
        f_val = (r0 * vr0 / smu * chi * chi * c
                 + (1.0 - alpha * r0) * chi ** 3 * s
                 + r0 * chi - smu * dt)
        f_der = (r0 * vr0 / smu * chi * (1.0 - z * s)
                 + (1.0 - alpha * r0) * chi * chi * c + r0)
        dchi = f_val / f_der
        chi -= dchi
        scale = max(1.0, abs(chi))
        if abs(dchi) <= 1e-14 * scale:
            break
        # near periastron Newton stalls in a roundoff limit cycle; accept once
        # the update is tiny and no longer improving
        if abs(dchi) >= abs(dchi_prev) and abs(dchi_prev) <= 1e-8 * scale:
            break
        dchi_prev = abs(dchi)
    else:
        raise SingularityError("universal Kepler equation failed to converge",
                               last_valid_time=None)

    z = alpha * chi * chi
    c, s = stumpff(z)
    f = 1.0 - chi * chi * c / r0
    g = dt - chi ** 3 * s / smu
    rv = f * r0v + g * v0v
    r = float(np.linalg.norm(rv))
    if r == 0.0 or r < 1e-12 * r0:
        raise SingularityError("propagation reached collision", last_valid_time=None)
    fdot = smu / (r * r0) * (alpha * chi ** 3 * s - chi)
    gdot = 1.0 - chi * chi * c / r
    vv = fdot * r0v + gdot * v0v
    return rv, vv


def step_fixed(state, dt: float, law: ForceLaw, G: float = G_SI):
    """Advance a pair of bodies by exactly dt under inverse-square gravity.

    Only valid for conservative inverse-square laws (Newtonian, or modified
    gravity with alpha = 0); anything else raises ``ContractViolationError``.
    Negative dt steps backwards, so step(+dt) followed by step(-dt) recovers
    the input state to roundoff.
    """
    if not is_inverse_square(law):
        raise ContractViolationError(
            f"fixed-step propagation requires an inverse-square conservative law, "
            f"got {law.variant}")
    if dt == 0.0 or not math.isfinite(dt):
        raise ValidationError(f"dt must be finite and nonzero, got {dt}")
    b1, b2 = state
    m1, m2 = b1.mass, b2.mass
    mtot = m1 + m2
    mu = G * mtot
    r1, r2 = b1.position.to_array(), b2.position.to_array()
    v1, v2 = b1.velocity.to_array(), b2.velocity.to_array()

    com_r = (m1 * r1 + m2 * r2) / mtot
    com_v = (m1 * v1 + m2 * v2) / mtot
    rel_r, rel_v = propagate_relative(r1 - r2, v1 - v2, mu, dt)

    com_r = com_r + com_v * dt
    f1, f2 = m2 / mtot, m1 / mtot
    new1 = BodyState(m1, Vector3.from_array(com_r + f1 * rel_r),
                     Vector3.from_array(com_v + f1 * rel_v))
    new2 = BodyState(m2, Vector3.from_array(com_r - f2 * rel_r),
                     Vector3.from_array(com_v - f2 * rel_v))
    return new1, new2
