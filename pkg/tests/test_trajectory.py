import numpy as np
import pytest

from orbitlab.bodies import ModifiedGravity, Vector3
from orbitlab.dynamics import kepler_period
from orbitlab.elements import local_extrema
from orbitlab.scenario import (load_scenario, save_scenario,
                               scenario_from_elements)
from orbitlab.trajectory import (CSV_HEADER, is_bound_scenario,
                                 read_trajectory_csv, simulate,
                                 write_trajectory_csv)
from orbitlab.units import AU_M, AU_YR_MSUN, G_SI, M_SUN


def test_kepler_period_recovered(catalog):
    # closed form: T = 2 pi sqrt(r^3 / G M)
    traj = simulate(catalog.scenario("circular-equal"))
    from orbitlab.elements import orbital_elements
    el = orbital_elements(traj)
    expected = kepler_period(AU_M, G_SI * 2 * M_SUN)
    assert el.period == pytest.approx(expected, rel=1e-6)
    assert expected == pytest.approx(2.23e7, rel=2e-3)


def test_row_count_and_grid():
    sc = scenario_from_elements("rows", M_SUN, M_SUN, AU_M, 0.1,
                                n_orbits=3, samples_per_orbit=700)
    traj = simulate(sc)
    assert len(traj) >= 3 * 700
    assert traj.times[0] == 0.0
    assert np.all(np.diff(traj.times) > 0)
    assert np.all(traj.positions[:, :, 2] == 0.0)


def test_determinism_byte_identical():
    sc = scenario_from_elements("det", 1.3 * M_SUN, 0.6 * M_SUN, AU_M, 0.45,
                                n_orbits=2, samples_per_orbit=400)
    a = simulate.__wrapped__(sc)         # bypass the cache to force recompute
    b = simulate.__wrapped__(sc)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.positions.tobytes() == b.positions.tobytes()
    assert simulate(sc) is simulate(sc)  # cached calls return the same object


def test_eccentric_apo_peri_ratio():
    # dense min/max separation against the (1+e)/(1-e) closed form
    sc = scenario_from_elements("e09", M_SUN, M_SUN, AU_M, 0.9,
                                n_orbits=2, samples_per_orbit=5000)
    traj = simulate(sc)
    seps = traj.separations()
    ratio = seps.max() / seps.min()
    assert ratio == pytest.approx(19.0, rel=1e-3)


def test_drag_separation_envelope_decreasing(catalog):
    traj = simulate(catalog.scenario("drag-b"))
    seps = traj.separations()
    _, max_idx = local_extrema(seps)
    maxima = seps[max_idx]
    assert len(maxima) >= 5
    assert np.all(np.diff(maxima) < 0)


def test_modified_zero_matches_newtonian_within_tolerance():
    base = scenario_from_elements("mz-newt", M_SUN, 0.8 * M_SUN, AU_M, 0.5,
                                  n_orbits=3, samples_per_orbit=1000)
    law = ModifiedGravity(alpha=0.0, r_ref=1.5 * AU_M)
    mod = scenario_from_elements("mz-mod", M_SUN, 0.8 * M_SUN, AU_M, 0.5,
                                 law=law, n_orbits=3, samples_per_orbit=1000)
    ta, tb = simulate(base), simulate(mod)
    assert np.max(np.abs(ta.positions - tb.positions)) <= 1e-6 * AU_M


def test_com_linear_under_proper_motion(catalog):
    sc = catalog.scenario("proper-motion-eccentric")
    traj = simulate(sc)
    m1, m2 = sc.bodies[0].mass, sc.bodies[1].mass
    com = (m1 * traj.positions[:, 0, :] + m2 * traj.positions[:, 1, :]) / (m1 + m2)
    for axis in (0, 1):
        coef = np.polyfit(traj.times, com[:, axis], 1)
        resid = com[:, axis] - np.polyval(coef, traj.times)
        assert np.max(np.abs(resid)) <= 1e-9 * 1.4 * AU_M


def test_com_linear_for_adaptive_law():
    sc = scenario_from_elements(
        "mod-pm", 1.2 * M_SUN, 0.9 * M_SUN, AU_M, 0.5,
        law=ModifiedGravity(alpha=0.05),
        com_velocity=Vector3(5e3, -3e3, 0.0),
        n_orbits=2, samples_per_orbit=800)
    traj = simulate(sc)
    m1, m2 = sc.bodies[0].mass, sc.bodies[1].mass
    com = (m1 * traj.positions[:, 0, :] + m2 * traj.positions[:, 1, :]) / (m1 + m2)
    for axis in (0, 1):
        coef = np.polyfit(traj.times, com[:, axis], 1)
        resid = com[:, axis] - np.polyval(coef, traj.times)
        assert np.max(np.abs(resid)) <= 1e-9 * AU_M


def test_unbound_scenario_falls_back_to_analog_horizon(catalog):
    sc = catalog.scenario("unbound-flyby")
    assert not is_bound_scenario(sc)
    traj = simulate(sc)
    assert len(traj) == sc.n_orbits * sc.samples_per_orbit + 1
    seps = traj.separations()
    assert seps[-1] > seps[0]            # flying apart


def test_csv_round_trip(tmp_path, small_trajectory, small_scenario):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(small_trajectory, path, unit_system=small_scenario.unit_system)
    first = path.read_text().splitlines()[0]
    assert first == CSV_HEADER
    times, positions = read_trajectory_csv(path)
    assert np.array_equal(times, small_trajectory.times)
    assert np.array_equal(positions, small_trajectory.positions)
    meta = (tmp_path / "traj.csv.meta.json").read_text()
    assert "kepler-fg" in meta and small_scenario.id in meta


def test_csv_in_presentation_units(tmp_path):
    sc = scenario_from_elements("au-csv", M_SUN, M_SUN, AU_M, 0.0,
                                unit_system=AU_YR_MSUN,
                                n_orbits=1, samples_per_orbit=100)
    traj = simulate(sc)
    path = tmp_path / "au.csv"
    write_trajectory_csv(traj, path, unit_system=sc.unit_system)
    times, positions = read_trajectory_csv(path)
    assert times[-1] == pytest.approx(traj.t_end / AU_YR_MSUN.time_s, rel=1e-14)
    assert np.max(np.abs(positions)) < 10.0      # AU-scale numbers


def test_scenario_file_round_trip(tmp_path, catalog):
    for sid in ("circular-equal", "modified-gravity-a", "drag-a", "circular-equal-au"):
        sc = catalog.scenario(sid)
        path = tmp_path / f"{sid}.json"
        save_scenario(sc, path)
        again = load_scenario(path)
        assert again == sc
