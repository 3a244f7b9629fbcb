"""Ground-truth orbital diagnostics from a dense trajectory.

Period, periastron, apoastron, semi-major axis and eccentricity are extracted
from the separation time series. Periastron passages give the period when the
orbit has measurable eccentricity; for near-circular orbits, where the
separation series is flat, the period comes from the unwrapped angle of the
relative position vector instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientCoverageError
from .units import G_SI

# below this relative separation spread an orbit is treated as circular
CIRCULAR_SPREAD = 1e-6


@dataclass(frozen=True)
class OrbitalElements:
    period: float
    semi_major: float
    eccentricity: float
    periastron: float
    apoastron: float


def parabolic_vertex(t, y):
    """Vertex of the parabola through three points; falls back to the middle
    point when the curvature vanishes."""
    t0, t1, t2 = t
    y0, y1, y2 = y
    d1 = (y1 - y0) / (t1 - t0)
    d2 = (y2 - y1) / (t2 - t1)
    curv = (d2 - d1) / (t2 - t0)
    if curv == 0.0:
        return t1, y1
    # vertex of y = y0 + d1 (t-t0) + curv (t-t0)(t-t1)
    tv = 0.5 * (t0 + t1) - d1 / (2.0 * curv)
    yv = y0 + d1 * (tv - t0) + curv * (tv - t0) * (tv - t1)
    return tv, yv


def local_extrema(values):
    """Indices of strict interior local minima and maxima."""
    v = np.asarray(values)
    interior = np.arange(1, len(v) - 1)
    mins = interior[(v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])]
    maxs = interior[(v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])]
    return mins, maxs


def refine_extrema(times, values, indices):
    """Sub-sample (time, value) for each extremum via a local parabola."""
    out_t, out_v = [], []
    for i in indices:
        tv, yv = parabolic_vertex(times[i - 1:i + 2], values[i - 1:i + 2])
        out_t.append(tv)
        out_v.append(yv)
    return np.array(out_t), np.array(out_v)


def unwrapped_angle(rel_positions):
    """Unwrapped polar angle of the relative position vector."""
    theta = np.arctan2(rel_positions[:, 1], rel_positions[:, 0])
    return np.unwrap(theta)


def angle_span(rel_positions) -> float:
    theta = unwrapped_angle(rel_positions)
    return abs(float(theta[-1] - theta[0]))


def period_from_angle(times, rel_positions) -> float:
    span = angle_span(rel_positions)
    if span <= 0:
        raise InsufficientCoverageError("relative vector does not revolve")
    return 2.0 * math.pi * float(times[-1] - times[0]) / span


def orbital_elements(traj, masses=None, G: float = G_SI) -> OrbitalElements:
    """Orbital diagnostics for a bound Newtonian trajectory covering >= 1 orbit.

    Raises ``InsufficientCoverageError`` for unbound trajectories or coverage
    below one full revolution.
    """
    times = traj.times
    rel = traj.relative_positions()
    seps = traj.separations()

    span = angle_span(rel)
    if span < 2.0 * math.pi * 0.999:
        raise InsufficientCoverageError(
            f"trajectory covers {span / (2 * math.pi):.3f} orbits; "
            "need at least one full orbit of a bound system")

    mean = float(seps.mean())
    spread = float(seps.max() - seps.min())
    if spread / mean < CIRCULAR_SPREAD:
        period = period_from_angle(times, rel)
        return OrbitalElements(period, mean, 0.0, mean, mean)

    min_idx, max_idx = local_extrema(seps)
    tmins, vmins = refine_extrema(times, seps, min_idx)
    _, vmaxs = refine_extrema(times, seps, max_idx)

    # boundary samples can hold the global extremes (e.g. a run that starts
    # exactly at apoastron)
    peri_candidates = list(vmins)
    apo_candidates = list(vmaxs) + [float(seps[0]), float(seps[-1])]
    if not peri_candidates:
        raise InsufficientCoverageError("no periastron passage found")
    periastron = float(np.min(peri_candidates))
    apoastron = float(np.max(apo_candidates))

    if len(tmins) >= 2:
        period = float(tmins[-1] - tmins[0]) / (len(tmins) - 1)
    else:
        period = period_from_angle(times, rel)

    semi_major = 0.5 * (periastron + apoastron)
    ecc = (apoastron - periastron) / (apoastron + periastron)
    return OrbitalElements(period, semi_major, ecc, periastron, apoastron)
