import math

import numpy as np
import pytest

from orbitlab.bodies import BodyState, LinearDrag, ModifiedGravity, Newtonian, Vector3
from orbitlab.dynamics import bodies_from_elements, kepler_period, total_energy
from orbitlab.errors import ContractViolationError, ValidationError
from orbitlab.kepler import step_fixed
from orbitlab.units import AU_M, G_SI, M_SUN


def test_zero_velocity_infall_symmetric():
    b1 = BodyState(M_SUN, Vector3(AU_M / 2, 0, 0), Vector3(0, 0, 0))
    b2 = BodyState(M_SUN, Vector3(-AU_M / 2, 0, 0), Vector3(0, 0, 0))
    n1, n2 = step_fixed((b1, b2), 1e4, Newtonian())
    assert n1.position.x == pytest.approx(-n2.position.x, rel=1e-14)
    assert n1.position.x < AU_M / 2              # falling inward
    assert n1.position.y == n1.position.z == 0.0
    assert n1.velocity.x < 0 < n2.velocity.x


def test_circular_orbit_returns_to_start():
    # analytic oracle: after exactly one period the circular orbit closes
    pair = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.0)
    period = kepler_period(AU_M, G_SI * 2 * M_SUN)
    n = 5000
    dt = period / n
    state = pair
    for _ in range(n):
        state = step_fixed(state, dt, Newtonian())
    for before, after in zip(pair, state):
        delta = np.linalg.norm(after.position.to_array() - before.position.to_array())
        assert delta <= 1e-6 * AU_M


@pytest.mark.parametrize("ecc", [0.0, 0.5, 0.93])
def test_reversibility(ecc):
    state = bodies_from_elements(1.2 * M_SUN, 0.8 * M_SUN, 1.3 * AU_M, ecc)
    period = kepler_period(1.3 * AU_M, G_SI * 2.0 * M_SUN)
    dt = period / 1000
    fwd = state
    for _ in range(37):
        fwd = step_fixed(fwd, dt, Newtonian())
    back = fwd
    for _ in range(37):
        back = step_fixed(back, -dt, Newtonian())
    for orig, rec in zip(state, back):
        scale = max(1.0, np.linalg.norm(orig.position.to_array()))
        vscale = max(1.0, np.linalg.norm(orig.velocity.to_array()))
        assert np.linalg.norm(rec.position.to_array()
                              - orig.position.to_array()) <= 1e-12 * scale
        assert np.linalg.norm(rec.velocity.to_array()
                              - orig.velocity.to_array()) <= 1e-12 * vscale


def test_energy_machine_precision_high_eccentricity():
    state = bodies_from_elements(M_SUN, 0.65 * M_SUN, 1.3 * AU_M, 0.93)
    e0 = total_energy(state, Newtonian())
    period = kepler_period(1.3 * AU_M, G_SI * 1.65 * M_SUN)
    dt = period / 5000
    for _ in range(6000):                     # through periastron
        state = step_fixed(state, dt, Newtonian())
    assert abs(total_energy(state, Newtonian()) - e0) <= 1e-11 * abs(e0)


def test_momentum_exact_with_proper_motion():
    base = bodies_from_elements(1.5 * M_SUN, M_SUN, AU_M, 0.4)
    drift = Vector3(9e3, -4e3, 0)
    state = tuple(BodyState(b.mass, b.position,
                            Vector3(b.velocity.x + drift.x,
                                    b.velocity.y + drift.y, b.velocity.z))
                  for b in base)
    p0 = sum((b.mass * b.velocity.to_array() for b in state), np.zeros(3))
    scale = sum(b.mass * np.linalg.norm(b.velocity.to_array()) for b in state)
    cur = state
    for _ in range(500):
        cur = step_fixed(cur, 5e3, Newtonian())
    p1 = sum((b.mass * b.velocity.to_array() for b in cur), np.zeros(3))
    assert np.linalg.norm(p1 - p0) <= 1e-13 * scale


def test_non_conservative_law_rejected():
    state = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.0)
    with pytest.raises(ContractViolationError):
        step_fixed(state, 1e3, LinearDrag(tau=1e9))
    with pytest.raises(ContractViolationError):
        step_fixed(state, 1e3, ModifiedGravity(alpha=0.05, r_ref=AU_M))
    # alpha = 0 is behaviorally Newtonian and allowed
    step_fixed(state, 1e3, ModifiedGravity(alpha=0.0, r_ref=AU_M))


def test_bad_dt_rejected():
    state = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.0)
    with pytest.raises(ValidationError):
        step_fixed(state, 0.0, Newtonian())
    with pytest.raises(ValidationError):
        step_fixed(state, math.nan, Newtonian())


def test_hyperbolic_state_supported():
    from orbitlab.dynamics import bodies_hyperbolic
    state = bodies_hyperbolic(M_SUN, M_SUN, 3 * AU_M, 1.3)
    e0 = total_energy(state, Newtonian())
    assert e0 > 0
    cur = state
    for _ in range(200):
        cur = step_fixed(cur, 2e4, Newtonian())
    assert total_energy(cur, Newtonian()) == pytest.approx(e0, rel=1e-12)
