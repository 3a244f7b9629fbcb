"""Dense ground-truth trajectories and the simulate() entry point."""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bodies import BodyState, Vector3, is_inverse_square
from .dynamics import osculating_period, specific_orbital_energy
from .errors import SingularityError, ValidationError
from .integrators import AdaptiveIntegrator
from .kepler import propagate_relative
from .scenario import Scenario
from .units import G_SI

DEFAULT_ADAPTIVE_TOL = 1e-12

CSV_HEADER = "time, star1_x, star1_y, star1_z, star2_x, star2_y, star2_z"
CSV_COLUMNS = [c.strip() for c in CSV_HEADER.split(",")]


@dataclass(frozen=True)
class IntegratorMeta:
    name: str
    step_policy: str
    tolerance: float | None


@dataclass(frozen=True)
class DenseTrajectory:
    """Hidden ground truth: body positions on a dense, strictly increasing
    time grid starting at t = 0. Arrays are read-only."""

    scenario_id: str
    times: np.ndarray            # (N,) seconds
    positions: np.ndarray        # (N, 2, 3) meters
    meta: IntegratorMeta

    def __post_init__(self):
        if self.times.shape[0] != self.positions.shape[0]:
            raise ValidationError("times and positions misaligned")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise ValidationError("times must start at 0 and strictly increase")

    def __len__(self):
        return self.times.shape[0]

    def separations(self):
        return np.linalg.norm(self.positions[:, 0, :] - self.positions[:, 1, :], axis=1)

    def relative_positions(self):
        return self.positions[:, 0, :] - self.positions[:, 1, :]

    @property
    def t_end(self):
        return float(self.times[-1])


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def _horizon(scenario: Scenario, G=G_SI):
    """Output grid layout: (dt, n_steps).

    Bound Newtonian runs cover n_orbits periods at samples_per_orbit steps per
    period. Drag, modified-gravity and unbound runs have no fixed period, so
    the horizon falls back to n_orbits times the initial osculating period
    (the bound analog's period when the state is unbound).
    """
    pos, vel, masses = scenario.initial_arrays()
    mu = G * float(masses.sum())
    rel_r = pos[0] - pos[1]
    rel_v = vel[0] - vel[1]
    t_orbit = osculating_period(rel_r, rel_v, mu)
    dt = t_orbit / scenario.samples_per_orbit
    n_steps = scenario.n_orbits * scenario.samples_per_orbit
    return dt, n_steps


def _simulate_kepler(scenario: Scenario, dt, n_steps, G):
    pos, vel, masses = scenario.initial_arrays()
    m1, m2 = masses
    mtot = m1 + m2
    mu = G * mtot
    com_r = (m1 * pos[0] + m2 * pos[1]) / mtot
    com_v = (m1 * vel[0] + m2 * vel[1]) / mtot
    rel_r = pos[0] - pos[1]
    rel_v = vel[0] - vel[1]
    f1, f2 = m2 / mtot, m1 / mtot

    out = np.empty((n_steps + 1, 2, 3))
    out[0, 0] = com_r + f1 * rel_r
    out[0, 1] = com_r - f2 * rel_r
    for i in range(1, n_steps + 1):
        try:
            rel_r, rel_v = propagate_relative(rel_r, rel_v, mu, dt)
        except SingularityError as exc:
            raise SingularityError(str(exc), last_valid_time=(i - 1) * dt) from exc
        c = com_r + com_v * (i * dt)
        out[i, 0] = c + f1 * rel_r
        out[i, 1] = c - f2 * rel_r
    return out


def _simulate_adaptive(scenario: Scenario, dt, n_steps, G, tol):
    pos, vel, masses = scenario.initial_arrays()
    b1 = BodyState(float(masses[0]), Vector3.from_array(pos[0]), Vector3.from_array(vel[0]))
    b2 = BodyState(float(masses[1]), Vector3.from_array(pos[1]), Vector3.from_array(vel[1]))
    integ = AdaptiveIntegrator((b1, b2), scenario.force_law, tol, G=G)
    out = np.empty((n_steps + 1, 2, 3))
    out[0, 0] = pos[0]
    out[0, 1] = pos[1]
    for i in range(1, n_steps + 1):
        try:
            integ.advance_to(i * dt)
        except SingularityError as exc:
            raise SingularityError(str(exc), last_valid_time=integ.t) from exc
        out[i, 0] = integ.y[0:3]
        out[i, 1] = integ.y[3:6]
    return out


@functools.lru_cache(maxsize=64)
def simulate(scenario: Scenario, G: float = G_SI,
             tol: float = DEFAULT_ADAPTIVE_TOL) -> DenseTrajectory:
    """Dense trajectory for a scenario.

    Purely Newtonian runs use the exact Kepler propagator on a fixed grid of
    samples_per_orbit steps per period; drag and modified-gravity runs use the
    adaptive 6(5) pair clamped onto the same output grid. Deterministic: the
    same scenario always yields a byte-identical trajectory (results are also
    cached, so repeated calls return the same object).
    """
    dt, n_steps = _horizon(scenario, G)
    if is_inverse_square(scenario.force_law):
        positions = _simulate_kepler(scenario, dt, n_steps, G)
        meta = IntegratorMeta("kepler-fg", f"fixed dt=T/{scenario.samples_per_orbit}", None)
    else:
        positions = _simulate_adaptive(scenario, dt, n_steps, G, tol)
        meta = IntegratorMeta("verner65-pi",
                              f"adaptive, clamped to T/{scenario.samples_per_orbit} grid", tol)
    times = dt * np.arange(n_steps + 1)
    return DenseTrajectory(scenario.id, _freeze(times), _freeze(positions), meta)


def is_bound_scenario(scenario: Scenario, G: float = G_SI) -> bool:
    pos, vel, masses = scenario.initial_arrays()
    mu = G * float(masses.sum())
    return specific_orbital_energy(pos[0] - pos[1], vel[0] - vel[1], mu) < 0


# --- export ---------------------------------------------------------------------


def write_trajectory_csv(traj: DenseTrajectory, path, unit_system=None):
    """Comma-separated table of the trajectory plus a JSON metadata sidecar.

    Values are written in the given presentation units (SI when omitted) with
    shortest round-trip float formatting, so the export is byte-deterministic.
    """
    path = Path(path)
    tf = 1.0 if unit_system is None else unit_system.time_s
    lf = 1.0 if unit_system is None else unit_system.length_m
    with path.open("w") as fh:
        fh.write(CSV_HEADER + "\n")
        for i in range(len(traj)):
            t = float(traj.times[i] / tf)
            p = traj.positions[i] / lf
            vals = (t, float(p[0, 0]), float(p[0, 1]), float(p[0, 2]),
                    float(p[1, 0]), float(p[1, 1]), float(p[1, 2]))
            fh.write(",".join(repr(v) for v in vals) + "\n")
    sidecar = {
        "scenario_id": traj.scenario_id,
        "rows": len(traj),
        "units": {"time": "s" if unit_system is None else unit_system.time_name,
                  "length": "m" if unit_system is None else unit_system.length_name},
        "integrator": {"name": traj.meta.name, "step_policy": traj.meta.step_policy,
                       "tolerance": traj.meta.tolerance},
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def read_trajectory_csv(path):
    """Times (N,) and positions (N,2,3) from an exported table, in file units."""
    import csv
    with Path(path).open() as fh:
        reader = csv.reader(fh, skipinitialspace=True)
        header = next(reader)
        if [c.strip() for c in header] != CSV_COLUMNS:
            raise ValidationError(f"unexpected trajectory header: {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    times = data[:, 0]
    positions = data[:, 1:].reshape(-1, 2, 3)
    return times, positions
