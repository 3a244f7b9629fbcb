"""Expert reference solvers.

Three tiers of reference solutions, all operating only on observation rows:

* full-data pipelines (``solve_full``) run on the complete dense table;
* ``solve_uniform`` runs the same pipelines on N uniformly spaced
  observations, the planning-free baseline used for threshold calibration;
* budget-aware strategies (``adaptive_extremum``,
  ``planned_gravity_exponent``) spend a limited budget deliberately.

Rows are interpreted in the unit system they were served in; pass the matching
gravitational constant (or the scenario's unit system) for mass and energy
pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .bodies import Vector3
from .elements import local_extrema, parabolic_vertex, period_from_angle
from .environment import (BudgetObs, ObservationRow, ObservationSession,
                          create_session, rows_to_arrays)
from .errors import (AmbiguityError, BindingError, BudgetExhaustedError,
                     ConditioningError, InsufficientCoverageError, ProtocolError,
                     SignalAbsentError, ValidationError)
from .units import SI, quantity_unit

MIN_ANGLE_COVERAGE = 0.98 * 2.0 * math.pi
CIRCULAR_SPREAD_SPARSE = 1e-3


@dataclass(frozen=True)
class KinematicSeries:
    """Finite-difference kinematics of both stars on an observation grid.

    Interior velocities are non-uniform central differences of position,
    interior accelerations non-uniform second central differences; the first
    and last samples are masked invalid.
    """

    times: np.ndarray            # (N,)
    velocities: np.ndarray       # (N, 2, 3)
    accelerations: np.ndarray    # (N, 2, 3)
    separation: np.ndarray       # (N,)
    valid: np.ndarray            # (N,) bool


@dataclass
class Estimate:
    value: float
    units: str
    observations_spent: int
    strategy_label: str
    diagnostics: dict = field(default_factory=dict)


def _second_difference(times, x):
    """Non-uniform 3-point second derivative at interior points, exact for
    quadratics."""
    h1 = (times[1:-1] - times[:-2])[:, None]
    h2 = (times[2:] - times[1:-1])[:, None]
    return 2.0 * (x[:-2] / (h1 * (h1 + h2)) - x[1:-1] / (h1 * h2)
                  + x[2:] / (h2 * (h1 + h2)))


def kinematics(rows) -> KinematicSeries:
    """Velocity and acceleration estimates from position rows.

    Requires at least three rows at strictly increasing times; duplicate times
    are a validation error.
    """
    if len(rows) < 3:
        raise ValidationError(f"kinematics needs >= 3 rows, got {len(rows)}")
    t, p = rows_to_arrays(rows)
    dt = np.diff(t)
    if np.any(dt == 0):
        raise ValidationError("duplicate observation times")
    if np.any(dt < 0):
        raise ValidationError("times must be strictly increasing")

    vel = np.stack([np.gradient(p[:, s, :], t, axis=0) for s in (0, 1)], axis=1)
    acc = np.zeros_like(p)
    for s in (0, 1):
        acc[1:-1, s, :] = _second_difference(t, p[:, s, :])
    sep = np.linalg.norm(p[:, 0, :] - p[:, 1, :], axis=1)
    valid = np.ones(len(t), dtype=bool)
    valid[0] = valid[-1] = False
    return KinematicSeries(t, vel, acc, sep, valid)


def _sorted_unique_rows(rows):
    t, p = rows_to_arrays(rows)
    order = np.argsort(t, kind="stable")
    t, p = t[order], p[order]
    keep = np.concatenate([[True], np.diff(t) > 0])
    return t[keep], p[keep]


# --- period ---------------------------------------------------------------------


def estimate_period(times, rel_positions):
    """Orbital period from relative positions, dense or sparse.

    Eccentric series: spacing of separation minima (medians guard against
    double-counted dips on sparse grids). Near-circular series have no usable
    minima, so the period comes from the unwrapped angle of the relative
    vector instead.
    """
    seps = np.linalg.norm(rel_positions, axis=1)
    mean = float(seps.mean())
    spread = float(seps.max() - seps.min())
    if mean <= 0:
        raise ValidationError("degenerate separation series")

    if spread / mean >= CIRCULAR_SPREAD_SPARSE:
        min_idx, _ = local_extrema(seps)
        if len(min_idx) >= 2:
            tmins = np.array([
                parabolic_vertex(times[i - 1:i + 2], seps[i - 1:i + 2])[0]
                for i in min_idx])
            diffs = np.diff(tmins)
            typical = float(np.median(diffs))
            n_orbits = max(1, round(float(tmins[-1] - tmins[0]) / typical))
            return float(tmins[-1] - tmins[0]) / n_orbits
    return period_from_angle(times, rel_positions)


# --- masses -----------------------------------------------------------------------


def mass_ratio_from_com(times, positions):
    """q = m2/m1 minimizing the residual of a straight-line fit in time to the
    mass-weighted mean position (x1 + q x2) / (1 + q).

    The residual is quadratic over linear in q, so the minimizer is closed
    form. Degenerate landscapes (both stars sharing the same residualized
    motion) raise ``AmbiguityError``.
    """
    t = times
    basis = np.stack([np.ones_like(t), t], axis=1)
    coef1, _, _, _ = np.linalg.lstsq(basis, positions[:, 0, :2], rcond=None)
    coef2, _, _, _ = np.linalg.lstsq(basis, positions[:, 1, :2], rcond=None)
    u = (positions[:, 0, :2] - basis @ coef1).ravel()
    w = (positions[:, 1, :2] - basis @ coef2).ravel()

    uu, ww, uw = float(u @ u), float(w @ w), float(u @ w)
    scale = max(uu, ww)
    if scale <= 0:
        raise AmbiguityError("no orbital signal in either star's motion")
    num = uu - uw
    den = ww - uw
    if abs(den) < 1e-12 * scale and abs(num) < 1e-12 * scale:
        raise AmbiguityError("mass-ratio residual landscape is degenerate")
    if abs(den) >= abs(num):
        q = num / den
    else:
        q = 1.0 / (den / num)
    if not (math.isfinite(q) and q > 0):
        raise AmbiguityError(f"mass-ratio fit produced q={q}")
    return q


def _coverage_check(times, rel_positions):
    from .elements import angle_span
    span = angle_span(rel_positions)
    if span < MIN_ANGLE_COVERAGE:
        raise InsufficientCoverageError(
            f"rows cover {span / (2 * math.pi):.2f} orbits; need >= 1")


def _extreme_separations(times, rel_positions):
    """(periastron, apoastron) as observed: extremal sampled separations.

    Deliberately reports the raw observed extremes rather than extrapolating
    a model below the data; sparse grids therefore overestimate periastron,
    which is exactly the planning gap the uniform baselines measure.
    """
    seps = np.linalg.norm(rel_positions, axis=1)
    return float(seps.min()), float(seps.max())


def infer_masses(rows, G=None):
    """(m1, m2) from rows spanning at least one orbit.

    Mass ratio from center-of-mass linearity (robust to barycenter offset and
    proper motion); total mass from Kepler's third law with the semi-major
    axis and period taken from the separation series.
    """
    G = SI.G if G is None else G
    t, p = _sorted_unique_rows(rows)
    if len(t) < 4:
        raise InsufficientCoverageError("too few rows to infer masses")
    rel = p[:, 0, :] - p[:, 1, :]
    _coverage_check(t, rel)
    q = mass_ratio_from_com(t, p)
    period = estimate_period(t, rel)
    peri, apo = _extreme_separations(t, rel)
    a = 0.5 * (peri + apo)
    mtot = 4.0 * math.pi ** 2 * a ** 3 / (G * period ** 2)
    return mtot / (1.0 + q), mtot * q / (1.0 + q)


# --- regression helpers --------------------------------------------------------------


def fit_power_law(x, y):
    """OLS fit of y = C x^s in log space; returns (s, C, rms residual).

    Non-positive values and duplicate x entries are dropped before the fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    order = np.argsort(x)
    x, y = x[order], y[order]
    dup = np.concatenate([[True], np.diff(x) > 0])
    x, y = x[dup], y[dup]
    if len(x) < 2:
        raise ConditioningError("need at least two distinct positive points")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(slope), float(np.exp(intercept)), rms


def fit_gravity_exponent(rows):
    """Deviation alpha of the force law F ~ 1/r^(2+alpha) from observations.

    Relative acceleration comes from second differences of the separation
    vector; a log-log regression of |a_rel| on r has slope -(2+alpha).
    Stencils spanning gaps much wider than the finest sampling are discarded,
    so both uniform tables and clustered triplet plans fit cleanly. Requires
    at least 20 rows and real dynamic range in separation.
    """
    if len(rows) < 20:
        raise ValidationError(f"need >= 20 rows, got {len(rows)}")
    t, p = _sorted_unique_rows(rows)
    rel = p[:, 0, :] - p[:, 1, :]
    seps = np.linalg.norm(rel, axis=1)
    if seps.max() / seps.min() < 1.05:
        raise ConditioningError(
            "separation range too small to constrain the force exponent "
            "(near-circular coverage)")
    a_rel = _second_difference(t, rel)
    widths = t[2:] - t[:-2]
    ok = widths <= 4.0 * widths.min()
    mag = np.linalg.norm(a_rel[ok], axis=1)
    r = seps[1:-1][ok]
    slope, _, rms = fit_power_law(r, mag)
    alpha = -slope - 2.0
    return alpha, {"slope": slope, "n_points": int(ok.sum()),
                   "log_rms_residual": rms,
                   "r_range": (float(r.min()), float(r.max()))}


def fit_drag_timescale(rows, G=None):
    """Drag timescale tau from the orbital energy decay.

    For a drag acceleration -v/tau the energy obeys dE/dt = -2K/tau, so E is
    linear in X(t) = 2 int K dt with slope -1/tau. Masses come from the
    center-of-mass ratio plus the dynamical total mass median(|a_rel| r^2)/G
    over an early window (Kepler's third law is biased on a decaying orbit).
    Raises ``SignalAbsentError`` when no decay signal is present.
    """
    G = SI.G if G is None else G
    t, p = _sorted_unique_rows(rows)
    if len(t) < 16:
        raise InsufficientCoverageError("too few rows to fit a drag timescale")
    rel = p[:, 0, :] - p[:, 1, :]
    _coverage_check(t, rel)
    q = mass_ratio_from_com(t, p)

    vel = np.stack([np.gradient(p[:, s, :], t, axis=0) for s in (0, 1)], axis=1)
    a_rel = _second_difference(t, rel)
    seps = np.linalg.norm(rel, axis=1)

    early = max(8, len(t) // 4)
    gm = float(np.median(np.linalg.norm(a_rel[:early], axis=1)
                         * seps[1:early + 1] ** 2))
    mtot = gm / G
    m1 = mtot / (1.0 + q)
    m2 = mtot - m1

    interior = slice(1, -1)
    ti = t[interior]
    kin = (0.5 * m1 * np.sum(vel[interior, 0, :] ** 2, axis=1)
           + 0.5 * m2 * np.sum(vel[interior, 1, :] ** 2, axis=1))
    pot = -G * m1 * m2 / seps[interior]
    energy = kin + pot

    x = 2.0 * np.concatenate([[0.0], np.cumsum(0.5 * (kin[1:] + kin[:-1]) * np.diff(ti))])
    slope, intercept = np.polyfit(x, energy, 1)
    decay = abs(slope * (x[-1] - x[0]))
    if decay < 1e-3 * abs(float(np.median(energy))):
        raise SignalAbsentError("no orbital energy decay in the data")
    if slope >= 0:
        raise SignalAbsentError("energy trend is not a decay")
    tau = -1.0 / slope
    return tau, {"mtot": mtot, "q": q, "energy_drop": float(energy[-1] - energy[0]),
                 "n_points": len(ti)}


# --- task pipelines -------------------------------------------------------------------

SOLVER_BOUND_TASKS = frozenset({
    "period", "total-mass", "mass-star1", "mass-star2", "total-energy",
    "eccentricity", "periastron", "apoastron", "max-speed-star1",
    "mean-distance-com-star1", "frac-accel-below-mean", "time-20pct-path",
    "gravity-exponent", "drag-timescale", "is-bound",
})


class _ArraysAsRows(list):
    """Adapter so array-level pipelines can reuse the row-based operations."""

    def __init__(self, t, p):
        super().__init__(
            ObservationRow(float(t[i]), Vector3(*p[i, 0]), Vector3(*p[i, 1]))
            for i in range(len(t)))


def _fd_speeds(t, p, star=0):
    v = np.gradient(p[:, star, :], t, axis=0)
    return np.linalg.norm(v, axis=1)


def _time_average(ti, values):
    return float(np.trapezoid(values, ti) / (ti[-1] - ti[0]))


def _solve_arrays(task_id, t, p, unit_system):
    """Dispatch a task pipeline over sorted row arrays in presentation units."""
    G = unit_system.G
    rel = p[:, 0, :] - p[:, 1, :]
    seps = np.linalg.norm(rel, axis=1)

    if task_id == "period":
        return estimate_period(t, rel)
    if task_id in ("total-mass", "mass-star1", "mass-star2"):
        m1, m2 = infer_masses(_ArraysAsRows(t, p), G=G)
        return {"total-mass": m1 + m2, "mass-star1": m1, "mass-star2": m2}[task_id]
    if task_id == "total-energy":
        m1, m2 = infer_masses(_ArraysAsRows(t, p), G=G)
        vel = np.stack([np.gradient(p[:, s, :], t, axis=0) for s in (0, 1)], axis=1)
        kin = (0.5 * m1 * np.sum(vel[:, 0, :] ** 2, axis=1)
               + 0.5 * m2 * np.sum(vel[:, 1, :] ** 2, axis=1))
        e_series = (kin - G * m1 * m2 / seps)[1:-1]
        return unit_system.energy_to_si(float(np.median(e_series)))
    if task_id in ("eccentricity", "periastron", "apoastron"):
        _coverage_check(t, rel)
        peri, apo = _extreme_separations(t, rel)
        if task_id == "periastron":
            return peri
        if task_id == "apoastron":
            return apo
        return (apo - peri) / (apo + peri)
    if task_id == "max-speed-star1":
        speeds = _fd_speeds(t, p)
        return float(speeds[1:-1].max())
    if task_id == "mean-distance-com-star1":
        q = mass_ratio_from_com(t, p)
        com = (p[:, 0, :] + q * p[:, 1, :]) / (1.0 + q)
        return _time_average(t, np.linalg.norm(p[:, 0, :] - com, axis=1))
    if task_id == "frac-accel-below-mean":
        acc = _second_difference(t, p[:, 0, :])
        mag = np.linalg.norm(acc, axis=1)
        ti = t[1:-1]
        mean = _time_average(ti, mag)
        if float(mag.max() - mag.min()) < 1e-9 * mean:
            return 0.0
        return _time_average(ti, (mag < mean).astype(float))
    if task_id == "time-20pct-path":
        period = estimate_period(t, rel)
        steps = np.linalg.norm(np.diff(p[:, 0, :], axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(steps)])
        total = float(np.interp(period, t, s))
        return float(np.interp(0.2 * total, s, t))
    if task_id == "gravity-exponent":
        alpha, _ = fit_gravity_exponent(_ArraysAsRows(t, p))
        return alpha
    if task_id == "drag-timescale":
        tau, _ = fit_drag_timescale(_ArraysAsRows(t, p), G=G)
        return tau
    if task_id == "is-bound":
        a_rel = _second_difference(t, rel)
        gm = float(np.median(np.linalg.norm(a_rel, axis=1) * seps[1:-1] ** 2))
        v_rel = np.gradient(rel, t, axis=0)
        eps = 0.5 * np.sum(v_rel[1:-1] ** 2, axis=1) - gm / seps[1:-1]
        return bool(np.median(eps) < 0)
    raise BindingError(f"no solver pipeline bound for task {task_id!r}")


def solve_full(task, rows, unit_system=SI) -> Estimate:
    """Expert solution from the full dense table (or any row set)."""
    t, p = _sorted_unique_rows(rows)
    value = _solve_arrays(task.solver_binding, t, p, unit_system)
    return Estimate(value, quantity_unit(task.quantity, unit_system),
                    observations_spent=0, strategy_label="expert-ref-full")


def solve_uniform(task, scenario, n, trajectory=None) -> Estimate:
    """The expert-ref-N baseline: N observations equally spaced in time,
    without planning, fed through the full-data pipeline."""
    if n < 3:
        raise ValidationError(f"need n >= 3, got {n}")
    session = create_session(scenario, BudgetObs(n), trajectory=trajectory)
    lo, hi = session.window
    times = np.linspace(lo, hi, n)
    rows = []
    for start in range(0, n, 10):
        rows.extend(session.observe(times[start:start + 10]))
    t, p = _sorted_unique_rows(rows)
    value = _solve_arrays(task.solver_binding, t, p, scenario.unit_system)
    return Estimate(value, quantity_unit(task.quantity, scenario.unit_system),
                    observations_spent=session.used,
                    strategy_label=f"expert-ref-{n}")


# --- budget-aware strategies ------------------------------------------------------------


class _OutOfBudget(Exception):
    pass


class _SessionTap:
    """Budget-guarded observation helper that accumulates every row seen."""

    def __init__(self, session: ObservationSession, budget: int):
        self.session = session
        self.allowance = min(budget, session.remaining)
        self.spent = 0
        self.times = []
        self.table = []

    def ask(self, times):
        times = list(times)
        out = []
        for start in range(0, len(times), 10):
            chunk = times[start:start + 10]
            if self.spent + len(chunk) > self.allowance:
                raise _OutOfBudget
            try:
                rows = self.session.observe(chunk)
            except BudgetExhaustedError:
                raise _OutOfBudget from None
            self.spent += len(chunk)
            for r in rows:
                self.times.append(r.time)
                self.table.append(r.as_tuple())
            out.extend(rows)
        return out

    def separations(self, rows):
        t, p = rows_to_arrays(rows)
        return t, np.linalg.norm(p[:, 0, :] - p[:, 1, :], axis=1)


def adaptive_extremum(session: ObservationSession, objective: str,
                      budget: int) -> Estimate:
    """Broad scan, candidate tracking, then iterative local refinement.

    Supports ``min_separation`` and ``max_speed``. Spends at most ``budget``
    observations; if the budget runs dry mid-refinement the best value so far
    is returned with ``diagnostics["exhausted"] = True``. The reported value
    is never worse than the best observation actually collected.
    """
    if objective not in ("min_separation", "max_speed"):
        raise ValidationError(f"unknown objective {objective!r}")
    if budget < 20:
        raise ValidationError("adaptive refinement needs a budget of at least 20")
    if not isinstance(session.protocol, BudgetObs):
        raise ProtocolError("adaptive_extremum requires a budget_obs session")

    tap = _SessionTap(session, budget)
    lo, hi = session.window
    exhausted = False
    candidates = []           # (time, objective value), best first

    try:
        if objective == "min_separation":
            _refine_min_separation(tap, lo, hi, candidates)
        else:
            _probe_max_speed(tap, lo, hi, candidates)
    except _OutOfBudget:
        exhausted = True

    if not candidates:
        raise InsufficientCoverageError("budget too small to evaluate the objective")

    sign = 1.0 if objective == "min_separation" else -1.0
    candidates.sort(key=lambda c: sign * c[1])
    best_t, best_v = candidates[0]
    refined = _parabola_polish(candidates, best_t, best_v, sign)
    value = min(best_v, refined) if sign > 0 else max(best_v, refined)

    units = "separation" if objective == "min_separation" else "speed"
    return Estimate(value, units, tap.spent,
                    strategy_label=f"adaptive-{objective}",
                    diagnostics={"exhausted": exhausted,
                                 "candidate_times": [c[0] for c in candidates[:8]],
                                 "best_time": best_t})


def _parabola_polish(candidates, best_t, best_v, sign):
    """Parabolic vertex through the best candidate and its two nearest
    distinct-time neighbours; falls back to the raw best value."""
    by_time = sorted({round(t, 15): v for t, v in candidates}.items())
    times = [t for t, _ in by_time]
    idx = times.index(round(best_t, 15))
    if idx == 0 or idx == len(times) - 1:
        return best_v
    t3 = np.array([times[idx - 1], times[idx], times[idx + 1]])
    v3 = np.array([by_time[idx - 1][1], by_time[idx][1], by_time[idx + 1][1]])
    tv, vv = parabolic_vertex(t3, v3)
    if not (t3[0] <= tv <= t3[2]) or not math.isfinite(vv):
        return best_v
    return vv


def _refine_min_separation(tap, lo, hi, candidates):
    scan_n = min(18, max(8, tap.allowance // 3))
    times = np.linspace(lo, hi, scan_n)
    t, s = tap.separations(tap.ask(times))
    for i in range(len(t)):
        candidates.append((float(t[i]), float(s[i])))
    spacing = float(t[1] - t[0])
    best = float(t[np.argmin(s)])

    while tap.allowance - tap.spent >= 8:
        left = max(lo, best - spacing)
        right = min(hi, best + spacing)
        sub = np.linspace(left, right, 10)[1:-1]
        t, s = tap.separations(tap.ask(sub))
        for i in range(len(t)):
            candidates.append((float(t[i]), float(s[i])))
        best = min(candidates, key=lambda c: c[1])[0]
        spacing = float(sub[1] - sub[0])
        if spacing <= (hi - lo) * 1e-6:
            break


def _probe_max_speed(tap, lo, hi, candidates):
    delta = (hi - lo) * 1e-4

    def probe(tc):
        tc = min(max(tc, lo), hi - delta)
        rows = tap.ask([tc, tc + delta])
        _, p = rows_to_arrays(rows)
        speed = float(np.linalg.norm(p[1, 0, :] - p[0, 0, :]) / delta)
        candidates.append((tc, speed))
        return speed

    remaining = tap.allowance - tap.spent
    if remaining < 34:
        # tight budget: uniform speed probes, then a short polish around the best
        n_broad = max(4, (remaining - 6) // 2)
        for tc in np.linspace(lo, hi - delta, n_broad):
            probe(float(tc))
        best_t = max(candidates, key=lambda c: c[1])[0]
        spacing = (hi - lo) / max(n_broad - 1, 1)
        for tc in (best_t - 0.3 * spacing, best_t + 0.3 * spacing,
                   best_t + 0.15 * spacing):
            if tap.allowance - tap.spent < 2:
                break
            probe(float(tc))
        return

    # position scan: maximum speed coincides with minimum separation
    scan_n = 12
    times = np.linspace(lo, hi, scan_n)
    t, s = tap.separations(tap.ask(times))
    spacing = float(t[1] - t[0])
    best = float(t[np.argmin(s)])

    rounds = 2 if tap.allowance - tap.spent >= 28 else 1
    for _ in range(rounds):
        left = max(lo, best - spacing)
        right = min(hi, best + spacing)
        sub = np.linspace(left, right, 10)[1:-1]
        ts, ss = tap.separations(tap.ask(sub))
        best = float(ts[np.argmin(ss)])
        spacing = float(sub[1] - sub[0])

    n_pairs = max(3, (tap.allowance - tap.spent) // 2)
    n_pairs = min(n_pairs, 6)
    for tc in np.linspace(best - spacing, best + spacing, n_pairs):
        probe(float(tc))


def planned_gravity_exponent(session: ObservationSession, budget: int = 70) -> Estimate:
    """Deliberate observation plan for the force-law exponent.

    Scans the first stretch of the window for one full separation cycle, maps
    separation to time on the monotone apoastron-to-periastron branch, then
    spends the bulk of the budget on tight triplets at separations log-spaced
    across the observed range. Each triplet yields one exact second-difference
    acceleration; the exponent comes from the log-log regression.
    """
    if not isinstance(session.protocol, BudgetObs):
        raise ProtocolError("planned strategy requires a budget_obs session")
    tap = _SessionTap(session, budget)
    lo, hi = session.window

    scan = np.linspace(lo, lo + 0.12 * (hi - lo), 10)
    t, s = tap.separations(tap.ask(scan))
    i_max, i_min = int(np.argmax(s)), int(np.argmin(s))
    a, b = sorted((i_max, i_min))
    branch_t, branch_s = t[a:b + 1], s[a:b + 1]
    if len(branch_t) < 3:
        raise ConditioningError("scan found no monotone separation branch")
    if branch_s[0] < branch_s[-1]:
        branch_s = branch_s[::-1]
        branch_t = branch_t[::-1]
    # strictly decreasing separation along the branch for inverse interpolation
    keep = np.concatenate([[True], np.diff(branch_s) < 0])
    branch_t, branch_s = branch_t[keep], branch_s[keep]

    targets = np.exp(np.linspace(math.log(branch_s.min() * 1.02),
                                 math.log(branch_s.max() * 0.98), 18))
    t_of_s = np.interp(targets[::-1], branch_s[::-1], branch_t[::-1])[::-1]
    span = abs(float(branch_t[-1] - branch_t[0]))
    delta = span / 600.0

    triplet_rows = []
    try:
        for tc in t_of_s:
            tc = min(max(tc, lo + delta), hi - delta)
            triplet_rows.append(tap.ask([tc - delta, tc, tc + delta]))
    except _OutOfBudget:
        pass
    if len(triplet_rows) < 7:
        raise ConditioningError("budget too small for a planned exponent fit")

    rs, mags = [], []
    for rows in triplet_rows:
        tt, pp = rows_to_arrays(rows)
        rel = pp[:, 0, :] - pp[:, 1, :]
        acc = _second_difference(tt, rel)[0]
        rs.append(float(np.linalg.norm(rel[1])))
        mags.append(float(np.linalg.norm(acc)))
    slope, _, rms = fit_power_law(rs, mags)
    alpha = -slope - 2.0
    return Estimate(alpha, "", tap.spent, strategy_label="planned-70",
                    diagnostics={"slope": slope, "n_triplets": len(triplet_rows),
                                 "log_rms_residual": rms})
