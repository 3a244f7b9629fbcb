import math

import numpy as np
import pytest

from orbitlab.bodies import (BodyState, LinearDrag, ModifiedGravity, Newtonian,
                             Vector3)
from orbitlab.dynamics import (accelerations, bodies_from_elements,
                               kepler_period, total_energy)
from orbitlab.errors import SingularityError, ValidationError
from orbitlab.units import AU_M, G_SI, M_SUN


def _pair(r=AU_M, m1=M_SUN, m2=M_SUN, v=0.0):
    b1 = BodyState(m1, Vector3(r / 2, 0, 0), Vector3(0, v, 0))
    b2 = BodyState(m2, Vector3(-r / 2, 0, 0), Vector3(0, -v, 0))
    return b1, b2


def test_equal_masses_on_axis_symmetric():
    a1, a2 = accelerations(_pair(), Newtonian())
    assert a1.x == -a2.x and a1.x < 0
    assert a1.y == a1.z == a2.y == a2.z == 0.0


def test_modified_alpha_zero_is_bitwise_newtonian():
    pair = bodies_from_elements(1.3 * M_SUN, 0.8 * M_SUN, 1.1 * AU_M, 0.37)
    base = accelerations(pair, Newtonian())
    same = accelerations(pair, ModifiedGravity(alpha=0.0, r_ref=2.7e11))
    assert base == same


def test_closed_form_magnitude():
    # hand-evaluated oracle: |a1| = G m2 / r^2
    a1, _ = accelerations(_pair(), Newtonian())
    expected = G_SI * M_SUN / AU_M ** 2
    assert a1.magnitude() == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(5.93e-3, rel=1e-3)


def test_momentum_conserving():
    pair = bodies_from_elements(2.2 * M_SUN, 0.7 * M_SUN, 1.4 * AU_M, 0.52)
    for law in (Newtonian(), ModifiedGravity(alpha=0.06, r_ref=2e11)):
        a1, a2 = accelerations(pair, law)
        m1, m2 = pair[0].mass, pair[1].mass
        assert m1 * a1.x == pytest.approx(-m2 * a2.x, rel=1e-15)
        assert m1 * a1.y == pytest.approx(-m2 * a2.y, rel=1e-15)


def test_drag_term_velocity_antiparallel():
    pair = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.3)
    tau = 1e9
    grav1, _ = accelerations(pair, Newtonian())
    drag1, _ = accelerations(pair, LinearDrag(tau=tau))
    extra = np.array([drag1.x - grav1.x, drag1.y - grav1.y, drag1.z - grav1.z])
    v1 = pair[0].velocity.to_array()
    assert np.allclose(extra, -v1 / tau, rtol=1e-12)


def test_coincident_positions_singularity():
    b = BodyState(M_SUN, Vector3(1e10, 0, 0), Vector3(0, 0, 0))
    with pytest.raises(SingularityError):
        accelerations((b, b), Newtonian())


def test_nonfinite_vector_rejected():
    with pytest.raises(ValidationError):
        Vector3(float("nan"), 0, 0)
    with pytest.raises(ValidationError):
        BodyState(-1.0, Vector3(0, 0, 0), Vector3(0, 0, 0))


def test_force_law_validation():
    with pytest.raises(ValidationError):
        ModifiedGravity(alpha=1.5)
    with pytest.raises(ValidationError):
        LinearDrag(tau=-1.0)


class TestTotalEnergy:
    def test_circular_closed_form(self):
        v = 0.5 * math.sqrt(G_SI * 2 * M_SUN / AU_M)
        e = total_energy(_pair(v=v), Newtonian())
        expected = -G_SI * M_SUN ** 2 / (2 * AU_M)
        assert e == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(-8.82e38, rel=1e-3)

    def test_kinetic_scaling(self):
        pair = bodies_from_elements(M_SUN, 0.6 * M_SUN, AU_M, 0.4)
        doubled = tuple(
            BodyState(b.mass, b.position,
                      Vector3(2 * b.velocity.x, 2 * b.velocity.y, 2 * b.velocity.z))
            for b in pair)
        u = -G_SI * M_SUN * 0.6 * M_SUN / np.linalg.norm(
            pair[0].position.to_array() - pair[1].position.to_array())
        k1 = total_energy(pair, Newtonian()) - u
        k2 = total_energy(doubled, Newtonian()) - u
        assert k2 == pytest.approx(4 * k1, rel=1e-12)

    def test_modified_alpha_zero_matches_newtonian(self):
        pair = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.2)
        assert total_energy(pair, ModifiedGravity(0.0, r_ref=3e11)) == \
            total_energy(pair, Newtonian())

    def test_drag_energy_well_defined(self):
        pair = bodies_from_elements(M_SUN, M_SUN, AU_M, 0.2)
        assert total_energy(pair, LinearDrag(tau=1e9)) == \
            total_energy(pair, Newtonian())

    def test_bound_system_negative_in_com_frame(self):
        pair = bodies_from_elements(1.7 * M_SUN, 0.4 * M_SUN, 2 * AU_M, 0.8)
        assert total_energy(pair, Newtonian()) < 0


def test_kepler_period_circular_value():
    t = kepler_period(AU_M, G_SI * 2 * M_SUN)
    assert t == pytest.approx(2.23e7, rel=1e-3)
