"""Adaptive embedded Runge-Kutta integration for non-Keplerian force laws.

Drag and modified-gravity runs cannot use the exact Kepler propagator, so they
are integrated with Verner's "most robust" 6(5) embedded pair under a
proportional-integral step-size controller. The last stage is evaluated at the
accepted solution (FSAL), so an accepted step costs eight new derivative
evaluations.
"""

from __future__ import annotations

import math
from fractions import Fraction as _Fr

import numpy as np

from .bodies import BodyState, ForceLaw, Vector3
from .dynamics import acceleration_arrays
from .errors import SingularityError, ValidationError
from .units import G_SI

# Verner 6(5) tableau (exact rationals, converted once to float64)
_C = [_Fr(0), _Fr(9, 50), _Fr(1, 6), _Fr(1, 4), _Fr(53, 100), _Fr(3, 5),
      _Fr(4, 5), _Fr(1), _Fr(1)]
_A = [
    [],
    [_Fr(9, 50)],
    [_Fr(29, 324), _Fr(25, 324)],
    [_Fr(1, 16), _Fr(0), _Fr(3, 16)],
    [_Fr(79129, 250000), _Fr(0), _Fr(-261237, 250000), _Fr(19663, 15625)],
    [_Fr(1336883, 4909125), _Fr(0), _Fr(-25476, 30875), _Fr(194159, 185250),
     _Fr(8225, 78546)],
    [_Fr(-2459386, 14727375), _Fr(0), _Fr(19504, 30875), _Fr(2377474, 13615875),
     _Fr(-6157250, 5773131), _Fr(902, 735)],
    [_Fr(2699, 7410), _Fr(0), _Fr(-252, 1235), _Fr(-1393253, 3993990),
     _Fr(236875, 72618), _Fr(-135, 49), _Fr(15, 22)],
    [_Fr(11, 144), _Fr(0), _Fr(0), _Fr(256, 693), _Fr(0), _Fr(125, 504),
     _Fr(125, 528), _Fr(5, 72)],
]
_B = [_Fr(11, 144), _Fr(0), _Fr(0), _Fr(256, 693), _Fr(0), _Fr(125, 504),
      _Fr(125, 528), _Fr(5, 72), _Fr(0)]
_B_HAT = [_Fr(28, 477), _Fr(0), _Fr(0), _Fr(212, 441), _Fr(-312500, 366177),
          _Fr(2125, 1764), _Fr(0), _Fr(-2105, 35532), _Fr(2995, 17766)]

N_STAGES = 9
ORDER = 6

RK_C = np.array([float(c) for c in _C])
RK_A = np.zeros((N_STAGES, N_STAGES))
for _i, _row in enumerate(_A):
    for _j, _v in enumerate(_row):
        RK_A[_i, _j] = float(_v)
RK_B = np.array([float(b) for b in _B])
RK_E = RK_B - np.array([float(b) for b in _B_HAT])   # error-estimate weights

TOL_MIN, TOL_MAX = 1e-14, 1e-6
_SAFETY = 0.9
_MIN_FACTOR, _MAX_FACTOR = 0.2, 5.0
_KI = 0.7 / ORDER            # proportional exponent
_KP = 0.4 / ORDER            # integral (previous-error) exponent
_MAX_REJECTS = 60


def _pack(state):
    b1, b2 = state
    return np.concatenate([b1.position.to_array(), b2.position.to_array(),
                           b1.velocity.to_array(), b2.velocity.to_array()])


def _unpack(y, m1, m2):
    return (BodyState(m1, Vector3.from_array(y[0:3]), Vector3.from_array(y[6:9])),
            BodyState(m2, Vector3.from_array(y[3:6]), Vector3.from_array(y[9:12])))


class AdaptiveIntegrator:
    """Stateful Verner 6(5) stepper with PI step-size control.

    The state vector is [r1, r2, v1, v2]. The error norm is scaled by the
    current separation (positions) and by max(speeds, circular speed at the
    separation) (velocities), giving scale-free relative control.
    """

    def __init__(self, state, law: ForceLaw, tol: float, G: float = G_SI, dt=None):
        if not (TOL_MIN < tol < TOL_MAX):
            raise ValidationError(f"tol must lie in ({TOL_MIN}, {TOL_MAX}), got {tol}")
        b1, b2 = state
        self.m1, self.m2 = b1.mass, b2.mass
        self.mu = G * (self.m1 + self.m2)
        self.law = law
        self.G = G
        self.tol = tol
        self.t = 0.0
        self.y = _pack(state)
        self._err_prev = 1.0
        self._k_first = self._deriv(self.y)
        self.dt_next = dt if dt is not None else self._initial_dt()

    def _deriv(self, y):
        a1, a2 = acceleration_arrays(y[0:3], y[3:6], y[6:9], y[9:12],
                                     self.m1, self.m2, self.law, self.G)
        return np.concatenate([y[6:9], y[9:12], a1, a2])

    def _scales(self, y0, y1):
        sep = max(float(np.linalg.norm(y0[0:3] - y0[3:6])),
                  float(np.linalg.norm(y1[0:3] - y1[3:6])))
        if sep == 0.0:
            raise SingularityError("coincident body positions", last_valid_time=self.t)
        v_char = math.sqrt(self.mu / sep)
        vmax = max(float(np.linalg.norm(y0[6:9])), float(np.linalg.norm(y0[9:12])),
                   float(np.linalg.norm(y1[6:9])), float(np.linalg.norm(y1[9:12])),
                   v_char)
        return sep, vmax

    def _initial_dt(self):
        sep = float(np.linalg.norm(self.y[0:3] - self.y[3:6]))
        if sep == 0.0:
            raise SingularityError("coincident body positions", last_valid_time=0.0)
        return 0.01 * 2.0 * math.pi * math.sqrt(sep ** 3 / self.mu)

    def step(self, max_dt=None):
        """Take one accepted step; returns dt_used.

        The attempted size is min(dt_next, max_dt); max_dt lets the caller
        land exactly on output-grid times.
        """
        dt = self.dt_next
        clamped = False
        if max_dt is not None and max_dt < dt:
            dt = max_dt
            clamped = True
        y0 = self.y
        k = np.empty((N_STAGES, 12))
        k[0] = self._k_first
        rejects = 0
        while True:
            if not math.isfinite(dt) or dt <= 0:
                raise SingularityError("step size underflow near singularity",
                                       last_valid_time=self.t)
            for i in range(1, N_STAGES):
                k[i] = self._deriv(y0 + dt * (RK_A[i, :i] @ k[:i]))
            y1 = y0 + dt * (RK_B @ k)
            err_vec = dt * (RK_E @ k)
            pos_scale, vel_scale = self._scales(y0, y1)
            err = max(float(np.max(np.abs(err_vec[0:6]))) / pos_scale,
                      float(np.max(np.abs(err_vec[6:12]))) / vel_scale) / self.tol
            if err <= 1.0:
                break
            rejects += 1
            if rejects > _MAX_REJECTS:
                raise SingularityError("step size underflow near singularity",
                                       last_valid_time=self.t)
            dt *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / ORDER))

        err = max(err, 1e-10)
        factor = _SAFETY * err ** (-_KI) * self._err_prev ** _KP
        self._err_prev = err
        grown = dt * min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        if clamped and rejects == 0:
            # a caller-imposed clamp must not shrink the controller's memory
            grown = max(grown, self.dt_next)
        self.dt_next = grown
        self.t += dt
        self.y = y1
        self._k_first = k[N_STAGES - 1]     # FSAL: last stage sits at y1
        return dt

    def advance_to(self, t_target):
        """Step until t == t_target, clamping the final steps onto the target."""
        while self.t < t_target:
            remaining = t_target - self.t
            if remaining <= 0:
                break
            self.step(max_dt=remaining)

    def state(self):
        return _unpack(self.y, self.m1, self.m2)


def step_adaptive(state, tol: float, law: ForceLaw, G: float = G_SI, dt=None):
    """One accepted adaptive step.

    Returns (new_state, dt_used, dt_next). ``dt`` seeds the attempted size;
    when omitted a heuristic based on the local dynamical time is used. Feed
    the returned dt_next back in to continue efficiently.
    """
    integ = AdaptiveIntegrator(state, law, tol, G=G, dt=dt)
    dt_used = integ.step()
    return integ.state(), dt_used, integ.dt_next
