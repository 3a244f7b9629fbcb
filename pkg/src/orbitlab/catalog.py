"""Task catalog: scenario library, task specs, pairings, and ground truths.

Sixteen scenarios cover standard orbits, an eccentric single-orbit system, an
unbound flyby, three modified-gravity and three drag variants, proper-motion
systems, and unit variants of the same physics. Fifteen tasks pair with every
scenario they apply to; inapplicable pairings are excluded with a reason.

Input-derived ground truths (masses, alpha, tau, energy, boundedness) are
exact; trajectory-derived ones are computed at dense resolution and
cross-checked against the orbital diagnostics where applicable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .bodies import LinearDrag, ModifiedGravity, Newtonian
from .dynamics import kepler_period, total_energy
from .elements import orbital_elements
from .errors import ScenarioNotFoundError, ValidationError
from .scenario import Scenario, scenario_from_elements, scenario_hyperbolic
from .bodies import Vector3
from .trajectory import DenseTrajectory, is_bound_scenario, simulate
from .units import (AU_M, AU_YR_MSUN, CGS, G_SI, M_SUN, SI, quantity_unit)


@dataclass(frozen=True)
class TaskSpec:
    """One benchmark task: what is asked, in which units, scored how."""

    id: str
    prompt_template: str                  # problem text; {units} placeholder
    answer_kind: str                      # "numeric" | "boolean"
    quantity: str                         # time|length|mass|speed|energy|dimensionless|boolean
    threshold_pct: float
    solver_binding: str
    zero_truth_abs_tol: Optional[float] = None   # absolute tolerance when truth == 0

    def __post_init__(self):
        if self.answer_kind not in ("numeric", "boolean"):
            raise ValidationError(f"bad answer_kind {self.answer_kind!r}")
        if not 5.0 <= self.threshold_pct <= 70.0:
            raise ValidationError(
                f"threshold_pct must lie in [5, 70], got {self.threshold_pct}")


@dataclass(frozen=True)
class TaskInstance:
    task: TaskSpec
    scenario_id: str
    ground_truth: Union[float, bool]
    units: str
    window_end: float                     # in the scenario's time units

    def __post_init__(self):
        if self.task.answer_kind == "numeric" and not math.isfinite(self.ground_truth):
            raise ValidationError("ground truth must be finite")


@dataclass
class Catalog:
    instances: List[TaskInstance]
    exclusions: List[Tuple[str, str, str]]        # (task_id, scenario_id, reason)
    scenarios: dict = field(default_factory=dict)  # id -> Scenario

    def scenario(self, scenario_id) -> Scenario:
        try:
            return self.scenarios[scenario_id]
        except KeyError:
            raise ScenarioNotFoundError(f"unknown scenario {scenario_id!r}") from None

    def find(self, task_id, scenario_id) -> TaskInstance:
        for inst in self.instances:
            if inst.task.id == task_id and inst.scenario_id == scenario_id:
                return inst
        raise ScenarioNotFoundError(f"no instance {task_id!r} x {scenario_id!r}")

    def select(self, task_id=None, scenario_id=None, substring=None):
        out = self.instances
        if task_id is not None:
            out = [i for i in out if i.task.id == task_id]
        if scenario_id is not None:
            out = [i for i in out if i.scenario_id == scenario_id]
        if substring is not None:
            out = [i for i in out
                   if substring in i.task.id or substring in i.scenario_id]
        return list(out)


# --- scenario library -----------------------------------------------------------


def _t0(m1, m2, a):
    return kepler_period(a, G_SI * (m1 + m2))


def scenario_library() -> List[Scenario]:
    """The sixteen shipped scenarios. Deterministic."""
    msun = M_SUN
    lib = [
        scenario_from_elements(
            "circular-equal", msun, msun, AU_M, 0.0,
            com_offset=Vector3(2.1e10, -1.3e10, 0.0)),
        scenario_from_elements(
            "eccentric-moderate", 1.4 * msun, 0.9 * msun, 1.2 * AU_M, 0.55,
            com_offset=Vector3(-8e10, 5e10, 0.0)),
        scenario_from_elements(
            "eccentric-close", 2.2 * msun, 1.3 * msun, 1.6 * AU_M, 0.8,
            com_offset=Vector3(1.2e11, 9e10, 0.0)),
        scenario_from_elements(
            "elliptical-single-orbit", msun, 0.65 * msun, 1.3 * AU_M, 0.93,
            n_orbits=1, com_offset=Vector3(-4e10, -6e10, 0.0)),
        scenario_hyperbolic(
            "unbound-flyby", 1.1 * msun, 0.9 * msun, 3.0 * AU_M, 1.25,
            com_offset=Vector3(3e10, -2e10, 0.0)),
        scenario_from_elements(
            "proper-motion-circular", 1.2 * msun, 0.8 * msun, 0.9 * AU_M, 0.0,
            com_offset=Vector3(6e10, 1e10, 0.0),
            com_velocity=Vector3(9.5e3, -4.2e3, 0.0)),
        scenario_from_elements(
            "proper-motion-eccentric", 1.6 * msun, msun, 1.4 * AU_M, 0.6,
            com_offset=Vector3(-9e10, 2e10, 0.0),
            com_velocity=Vector3(-7.0e3, 1.1e4, 0.0)),
        scenario_from_elements(
            "modified-gravity-a", 1.1 * msun, 0.9 * msun, AU_M, 0.6,
            law=ModifiedGravity(alpha=0.03),
            com_offset=Vector3(3e10, -7e10, 0.0)),
        scenario_from_elements(
            "modified-gravity-b", msun, msun, 0.9 * AU_M, 0.55,
            law=ModifiedGravity(alpha=-0.05),
            com_offset=Vector3(-5e10, 4e10, 0.0)),
        scenario_from_elements(
            "modified-gravity-c", 1.3 * msun, 0.7 * msun, 1.1 * AU_M, 0.65,
            law=ModifiedGravity(alpha=0.08),
            com_offset=Vector3(8e10, 6e10, 0.0)),
        scenario_from_elements(
            "drag-a", msun, 0.8 * msun, 0.8 * AU_M, 0.3,
            law=LinearDrag(tau=40.0 * _t0(M_SUN, 0.8 * M_SUN, 0.8 * AU_M)),
            com_offset=Vector3(4e10, 3e10, 0.0)),
        scenario_from_elements(
            "drag-b", 0.9 * msun, 0.9 * msun, AU_M, 0.25,
            law=LinearDrag(tau=20.0 * _t0(0.9 * M_SUN, 0.9 * M_SUN, AU_M)),
            com_offset=Vector3(-6e10, -2e10, 0.0)),
        scenario_from_elements(
            "drag-c", 1.5 * msun, msun, 1.2 * AU_M, 0.5,
            law=LinearDrag(tau=80.0 * _t0(1.5 * M_SUN, M_SUN, 1.2 * AU_M)),
            com_offset=Vector3(7e10, -9e10, 0.0)),
        scenario_from_elements(
            "circular-equal-au", msun, msun, AU_M, 0.0,
            com_offset=Vector3(2.1e10, -1.3e10, 0.0), unit_system=AU_YR_MSUN),
        scenario_from_elements(
            "eccentric-moderate-cgs", 1.4 * msun, 0.9 * msun, 1.2 * AU_M, 0.55,
            com_offset=Vector3(-8e10, 5e10, 0.0), unit_system=CGS),
        scenario_from_elements(
            "eccentric-heavy", 3.2 * msun, 0.8 * msun, 1.5 * AU_M, 0.45,
            com_offset=Vector3(5e10, 8e10, 0.0)),
    ]
    return lib


# --- task table -----------------------------------------------------------------
#
# Thresholds are pinned from one deterministic run of the calibration pipeline
# (median expert-ref-100 vs full-data gap, clamped to [5, 70]); the evaluation
# tests assert the pipeline still reproduces them.

TASKS: List[TaskSpec] = [
    TaskSpec("period",
             "Determine the orbital period of the binary system.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "time", 5.0, "period"),
    TaskSpec("total-mass",
             "Determine the total mass of the binary system.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "mass", 5.0, "total-mass"),
    TaskSpec("mass-star1",
             "Determine the mass of star 1.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "mass", 5.0, "mass-star1"),
    TaskSpec("mass-star2",
             "Determine the mass of star 2.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "mass", 5.0, "mass-star2"),
    TaskSpec("total-energy",
             "Determine the total energy (K + U) for the system.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "energy", 5.0, "total-energy"),
    TaskSpec("eccentricity",
             "Determine the eccentricity of the system's orbit.\n"
             "You must provide your answer as a dimensionless number.",
             "numeric", "dimensionless", 5.0, "eccentricity",
             zero_truth_abs_tol=0.05),
    TaskSpec("periastron",
             "Determine the periastron of the system's orbit, the minimum "
             "separation between the two stars.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "length", 5.0, "periastron"),
    TaskSpec("apoastron",
             "Determine the apoastron of the system's orbit, the maximum "
             "separation between the two stars.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "length", 5.0, "apoastron"),
    TaskSpec("max-speed-star1",
             "Determine the maximum speed reached by star 1.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "speed", 26.3, "max-speed-star1"),
    TaskSpec("mean-distance-com-star1",
             "Determine star 1's time-averaged distance from the center of "
             "mass of the system.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "length", 5.0, "mean-distance-com-star1"),
    TaskSpec("frac-accel-below-mean",
             "Determine the fraction of time that the magnitude of star 1's "
             "acceleration is below its time-averaged mean.\n"
             "You must provide your answer as a dimensionless number.",
             "numeric", "dimensionless", 7.2, "frac-accel-below-mean"),
    TaskSpec("time-20pct-path",
             "Determine the time it takes star 1 to travel 20% of its orbital "
             "path, starting from time zero. The orbital path length is the "
             "distance star 1 covers over one full orbital period.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "time", 5.0, "time-20pct-path"),
    TaskSpec("drag-timescale",
             "In this system each star experiences, in addition to gravity, a "
             "drag acceleration a = -v / tau for a constant timescale tau. "
             "Determine tau.\n"
             "You must provide your answer in units of {units}.",
             "numeric", "time", 67.1, "drag-timescale"),
    TaskSpec("gravity-exponent",
             "In this system the magnitude of the gravitational force between "
             "the stars follows a modified law proportional to 1 / r^(2+alpha), "
             "where r is the separation. Determine alpha (alpha = 0 would be "
             "standard gravity).\n"
             "You must provide your answer as a dimensionless number.",
             "numeric", "dimensionless", 70.0, "gravity-exponent"),
    TaskSpec("is-bound",
             "Determine whether the two stars are gravitationally bound to "
             "each other.\n"
             "You must provide your answer as either true or false.",
             "boolean", "boolean", 5.0, "is-bound"),
]

TASKS_BY_ID = {t.id: t for t in TASKS}


# --- applicability ----------------------------------------------------------------


def _initial_eccentricity(sc: Scenario, G=G_SI):
    pos, vel, masses = sc.initial_arrays()
    mu = G * float(masses.sum())
    r = pos[0] - pos[1]
    v = vel[0] - vel[1]
    rn = float(np.linalg.norm(r))
    e_vec = ((float(v @ v) - mu / rn) * r - float(r @ v) * v) / mu
    return float(np.linalg.norm(e_vec))


def applicability(task: TaskSpec, sc: Scenario):
    """(applicable, reason_if_not)."""
    newtonian = sc.force_law.variant == "newtonian"
    bound = is_bound_scenario(sc)

    if task.id == "gravity-exponent":
        if sc.force_law.variant != "modified_gravity":
            return False, "gravity-exponent applies only to modified-gravity scenarios"
        return True, ""
    if task.id == "drag-timescale":
        if sc.force_law.variant != "linear_drag":
            return False, "drag-timescale applies only to drag scenarios"
        return True, ""
    if task.id == "is-bound":
        if not newtonian:
            return False, "boundedness is posed only for standard-gravity scenarios"
        return True, ""

    # every remaining task needs a bound Newtonian orbit with a stable period
    if not newtonian:
        return False, "orbital-element tasks require standard gravity"
    if not bound:
        return False, "requires a bound orbit"

    if task.id == "frac-accel-below-mean" and _initial_eccentricity(sc) < 0.01:
        return False, "degenerate on circular orbits (constant acceleration)"
    if task.id == "time-20pct-path" and sc.com_velocity.magnitude() > 0:
        return False, "path length is frame-dependent under proper motion"
    return True, ""


# --- ground truths ----------------------------------------------------------------


def _dense(sc: Scenario) -> DenseTrajectory:
    return simulate(sc)


def _finite_difference_speeds(traj: DenseTrajectory, star=0):
    v = np.gradient(traj.positions[:, star, :], traj.times, axis=0)
    return np.linalg.norm(v, axis=1)


def _second_difference_accel(times, positions):
    """Non-uniform three-point second difference, exact for quadratics.
    Boundary entries are invalid and excluded by callers."""
    t = times
    x = positions
    h1 = (t[1:-1] - t[:-2])[:, None]
    h2 = (t[2:] - t[1:-1])[:, None]
    return 2.0 * (x[:-2] / (h1 * (h1 + h2)) - x[1:-1] / (h1 * h2)
                  + x[2:] / (h2 * (h1 + h2)))


def _max_speed_star1(traj: DenseTrajectory):
    speeds = _finite_difference_speeds(traj, star=0)
    i = int(np.argmax(speeds[1:-1])) + 1
    from .elements import parabolic_vertex
    _, peak = parabolic_vertex(traj.times[i - 1:i + 2], speeds[i - 1:i + 2])
    return max(float(peak), float(speeds[i]))


def _mean_distance_com(traj: DenseTrajectory, m1, m2):
    com = (m1 * traj.positions[:, 0, :] + m2 * traj.positions[:, 1, :]) / (m1 + m2)
    d = np.linalg.norm(traj.positions[:, 0, :] - com, axis=1)
    return float(np.trapezoid(d, traj.times) / (traj.times[-1] - traj.times[0]))


def _frac_accel_below_mean(traj: DenseTrajectory):
    acc = _second_difference_accel(traj.times, traj.positions[:, 0, :])
    mag = np.linalg.norm(acc, axis=1)
    t = traj.times[1:-1]
    mean = float(np.trapezoid(mag, t) / (t[-1] - t[0]))
    spread = float(mag.max() - mag.min())
    if spread < 1e-9 * mean:
        return 0.0          # exactly constant magnitude: strict < never holds
    below = (mag < mean).astype(float)
    return float(np.trapezoid(below, t) / (t[-1] - t[0]))


def _time_to_20pct_path(traj: DenseTrajectory, period):
    steps = np.linalg.norm(np.diff(traj.positions[:, 0, :], axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    total = float(np.interp(period, traj.times, s))
    target = 0.2 * total
    return float(np.interp(target, s, traj.times))


def ground_truth(task: TaskSpec, sc: Scenario):
    """(value, units) for a task on a scenario, in the scenario's answer units."""
    u = sc.unit_system
    units = quantity_unit(task.quantity, u)
    m1, m2 = sc.bodies[0].mass, sc.bodies[1].mass

    if task.id == "total-mass":
        return (m1 + m2) / u.mass_kg, units
    if task.id == "mass-star1":
        return m1 / u.mass_kg, units
    if task.id == "mass-star2":
        return m2 / u.mass_kg, units
    if task.id == "gravity-exponent":
        return sc.force_law.alpha, units
    if task.id == "drag-timescale":
        return sc.force_law.tau / u.time_s, units
    if task.id == "is-bound":
        return is_bound_scenario(sc), units
    if task.id == "total-energy":
        pos, vel, masses = sc.initial_arrays()
        from .bodies import BodyState
        bodies = tuple(BodyState(float(masses[i]), Vector3.from_array(pos[i]),
                                 Vector3.from_array(vel[i])) for i in range(2))
        return total_energy(bodies, sc.force_law, G_SI), units

    traj = _dense(sc)
    if task.id in ("period", "eccentricity", "periastron", "apoastron",
                   "time-20pct-path"):
        el = orbital_elements(traj, (m1, m2))
        expected = kepler_period(el.semi_major, G_SI * (m1 + m2))
        if abs(el.period - expected) > 1e-3 * expected:
            raise ValidationError(
                f"{sc.id}: diagnostic period {el.period:.6e} disagrees with "
                f"Kepler cross-check {expected:.6e}")
        if task.id == "period":
            return el.period / u.time_s, units
        if task.id == "eccentricity":
            return el.eccentricity, units
        if task.id == "periastron":
            return el.periastron / u.length_m, units
        if task.id == "apoastron":
            return el.apoastron / u.length_m, units
        return _time_to_20pct_path(traj, el.period) / u.time_s, units
    if task.id == "max-speed-star1":
        return _max_speed_star1(traj) * u.time_s / u.length_m, units
    if task.id == "mean-distance-com-star1":
        return _mean_distance_com(traj, m1, m2) / u.length_m, units
    if task.id == "frac-accel-below-mean":
        return _frac_accel_below_mean(traj), units
    raise ValidationError(f"no ground truth rule for task {task.id!r}")


# --- catalog assembly ---------------------------------------------------------------


def build_catalog(tasks=None, scenarios=None) -> Catalog:
    """Every valid (task x scenario) pairing with computed ground truths.

    Deterministic: the shipped tasks over the shipped scenario library always
    produce the same catalog. Custom tasks/scenarios may be passed in.
    """
    tasks = TASKS if tasks is None else tasks
    scenarios = scenario_library() if scenarios is None else scenarios
    ids = [s.id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ValidationError("scenario ids must be unique in a catalog")

    instances, exclusions = [], []
    for task in tasks:
        for sc in scenarios:
            ok, reason = applicability(task, sc)
            if not ok:
                exclusions.append((task.id, sc.id, reason))
                continue
            value, units = ground_truth(task, sc)
            window_end = simulate(sc).t_end / sc.unit_system.time_s
            instances.append(TaskInstance(task, sc.id, value, units, window_end))
    return Catalog(instances, exclusions, {s.id: s for s in scenarios})


def catalog_manifest(catalog: Catalog) -> dict:
    return {
        "instances": [
            {"task": i.task.id, "scenario": i.scenario_id, "units": i.units,
             "threshold_pct": i.task.threshold_pct, "window_end": i.window_end}
            for i in catalog.instances
        ],
        "excluded": [
            {"task": t, "scenario": s, "reason": r}
            for (t, s, r) in catalog.exclusions
        ],
    }


def save_manifest(catalog: Catalog, path):
    Path(path).write_text(json.dumps(catalog_manifest(catalog), indent=2) + "\n")
