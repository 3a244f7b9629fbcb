"""Observation protocols mediating all agent access to trajectories.

Two protocols exist: ``FullObs`` grants the complete dense table once-off via
``full_table``; ``BudgetObs`` grants up to ``n_obs`` timestamped queries via
``observe``, at most ten times per call, anywhere inside the window (including
back in time). Off-grid times are served by monotone-time piecewise-cubic
interpolation (Hermite segments with finite-difference slopes). Budget
accounting is atomic: a failed call charges nothing.

All values a session returns are expressed in the scenario's presentation
units; the interpolant is built once in those units so that a query at a grid
time reproduces the stored row bit-for-bit.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .bodies import Vector3
from .errors import (BudgetExhaustedError, CapError, ProtocolError,
                     ValidationError, WindowError)
from .trajectory import DenseTrajectory, simulate

PER_CALL_CAP = 10
DEFAULT_BUDGET = 100


@dataclass(frozen=True)
class FullObs:
    name = "full_obs"


@dataclass(frozen=True)
class BudgetObs:
    n_obs: int = DEFAULT_BUDGET

    name = "budget_obs"

    def __post_init__(self):
        if self.n_obs < 1:
            raise ValidationError(f"n_obs must be >= 1, got {self.n_obs}")


Protocol = Union[FullObs, BudgetObs]


@dataclass(frozen=True)
class ObservationRow:
    time: float
    star1: Vector3
    star2: Vector3

    def as_tuple(self):
        return (self.time, self.star1.x, self.star1.y, self.star1.z,
                self.star2.x, self.star2.y, self.star2.z)

    @classmethod
    def from_tuple(cls, values):
        t, x1, y1, z1, x2, y2, z2 = values
        return cls(float(t), Vector3(x1, y1, z1), Vector3(x2, y2, z2))


class ObservationSession:
    """Budget-accounted window onto one trajectory.

    Thread-safe for the single-writer contract: concurrent observe calls on a
    session serialize on an internal lock. The collected log is append-only.
    """

    def __init__(self, trajectory: DenseTrajectory, protocol: Protocol,
                 unit_system=None, per_call_cap: int = PER_CALL_CAP):
        self.protocol = protocol
        self.per_call_cap = per_call_cap
        self.scenario_id = trajectory.scenario_id
        self.used = 0
        self.collected: List[ObservationRow] = []
        self.transcript: List[dict] = []
        self._lock = threading.Lock()

        tf = 1.0 if unit_system is None else unit_system.time_s
        lf = 1.0 if unit_system is None else unit_system.length_m
        self._times = trajectory.times / tf
        self._table = trajectory.positions.reshape(len(trajectory), 6) / lf
        self.window = (0.0, float(self._times[-1]))
        slopes = np.gradient(self._table, self._times, axis=0)
        self._spline = CubicHermiteSpline(self._times, self._table, slopes, axis=0)

    # -- protocol surface ---------------------------------------------------

    @property
    def remaining(self):
        if isinstance(self.protocol, BudgetObs):
            return self.protocol.n_obs - self.used
        return None

    def _row_at(self, t: float) -> ObservationRow:
        idx = np.searchsorted(self._times, t)
        if idx < len(self._times) and self._times[idx] == t:
            vals = self._table[idx]          # exact at grid times
        else:
            vals = self._spline(t)
        return ObservationRow(t, Vector3(*vals[0:3]), Vector3(*vals[3:6]))

    def observe(self, times) -> List[ObservationRow]:
        """Rows at the requested times, charged against the budget.

        Validation happens before any accounting, so rejected calls (window,
        cap, exhaustion, protocol) charge nothing. Duplicate times within one
        call are each charged.
        """
        try:
            times_list = [float(t) for t in times]
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"times must be numeric: {exc}") from exc
        with self._lock:
            try:
                rows = self._observe_validated(times_list)
            except Exception as exc:
                self.transcript.append({"type": "exchange", "times": times_list,
                                        "error": type(exc).__name__, "used": self.used})
                raise
            self.transcript.append({
                "type": "exchange",
                "times": [r.time for r in rows],
                "rows": [r.as_tuple() for r in rows],
                "used": self.used,
            })
            return rows

    def _observe_validated(self, times):
        if not isinstance(self.protocol, BudgetObs):
            raise ProtocolError("observe is only available under budget_obs")
        if not 1 <= len(times) <= self.per_call_cap:
            raise CapError(
                f"a call must request between 1 and {self.per_call_cap} times, "
                f"got {len(times)}")
        lo, hi = self.window
        for t in times:
            t = float(t)
            if not math.isfinite(t) or t < lo or t > hi:
                raise WindowError(f"time {t} outside window [{lo}, {hi}]")
        if self.used + len(times) > self.protocol.n_obs:
            raise BudgetExhaustedError(
                f"request of {len(times)} exceeds remaining budget "
                f"{self.protocol.n_obs - self.used}")
        rows = [self._row_at(float(t)) for t in times]
        self.used += len(times)
        self.collected.extend(rows)
        return rows

    def full_table(self) -> List[ObservationRow]:
        """Every dense sample; only available under full_obs."""
        if not isinstance(self.protocol, FullObs):
            raise ProtocolError("full_table is only available under full_obs")
        with self._lock:
            rows = [ObservationRow(float(self._times[i]),
                                   Vector3(*self._table[i, 0:3]),
                                   Vector3(*self._table[i, 3:6]))
                    for i in range(len(self._times))]
            self.transcript.append({"type": "full_table", "rows": len(rows)})
            return rows

    # -- transcript ----------------------------------------------------------

    def save_transcript(self, path):
        with Path(path).open("w") as fh:
            for entry in self.transcript:
                fh.write(json.dumps(entry) + "\n")


def create_session(scenario, protocol: Protocol, trajectory=None) -> ObservationSession:
    """Open a session over a scenario's dense trajectory.

    Simulates on demand when no trajectory is supplied. The window upper end
    equals the final dense sample time.
    """
    if trajectory is None:
        trajectory = simulate(scenario)
    return ObservationSession(trajectory, protocol, unit_system=scenario.unit_system)


def observe(session: ObservationSession, times):
    return session.observe(times)


def full_table(session: ObservationSession):
    return session.full_table()


def replay_transcript(session: ObservationSession, transcript) -> list:
    """Re-issue the logged time requests on a fresh session; returns the
    canonical JSON encoding of each response for byte-level comparison."""
    replies = []
    for entry in transcript:
        if entry.get("type") != "exchange" or "rows" not in entry:
            continue            # failed calls charged nothing; skip on replay
        rows = session.observe(entry["times"])
        replies.append(json.dumps([r.as_tuple() for r in rows]))
    return replies


def rows_to_arrays(rows):
    """(times (N,), positions (N,2,3)) from observation rows."""
    n = len(rows)
    t = np.empty(n)
    p = np.empty((n, 2, 3))
    for i, r in enumerate(rows):
        t[i] = r.time
        p[i, 0] = (r.star1.x, r.star1.y, r.star1.z)
        p[i, 1] = (r.star2.x, r.star2.y, r.star2.z)
    return t, p
