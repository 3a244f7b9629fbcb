"""
Simulating binary systems and reading off ground-truth diagnostics
==================================================================

Build a scenario from orbital elements, run the machine-precision simulator,
and compare the extracted orbital elements against the closed-form values.
"""

import numpy as np

from orbitlab import (ModifiedGravity, orbital_elements, scenario_from_elements,
                      simulate)
from orbitlab.dynamics import kepler_period
from orbitlab.units import AU_M, G_SI, M_SUN

# A moderately eccentric unequal binary. Everything is SI internally.
sc = scenario_from_elements("demo-binary", m1=1.4 * M_SUN, m2=0.9 * M_SUN,
                            a=1.2 * AU_M, e=0.55)
traj = simulate(sc)
print(f"simulated {len(traj)} samples over {traj.t_end:.3e} s "
      f"({sc.n_orbits} orbits at {sc.samples_per_orbit}/orbit)")

el = orbital_elements(traj, (1.4 * M_SUN, 0.9 * M_SUN))
t_kepler = kepler_period(1.2 * AU_M, G_SI * 2.3 * M_SUN)
print(f"period    {el.period:.6e} s   (Kepler: {t_kepler:.6e} s)")
print(f"ecc       {el.eccentricity:.6f}        (input: 0.55)")
print(f"periastron {el.periastron:.4e} m  (a(1-e) = {1.2*AU_M*0.45:.4e} m)")
print(f"apoastron  {el.apoastron:.4e} m  (a(1+e) = {1.2*AU_M*1.55:.4e} m)")

# Out-of-distribution physics: steepen the force law by alpha = 0.05.
# The orbit precesses, so the separation pattern drifts orbit to orbit.
mod = scenario_from_elements("demo-modified", m1=1.4 * M_SUN, m2=0.9 * M_SUN,
                             a=1.2 * AU_M, e=0.55,
                             law=ModifiedGravity(alpha=0.05))
mtraj = simulate(mod)
drift = np.abs(mtraj.separations() - traj.separations())
print(f"\nmodified-gravity twin diverges by up to {drift.max():.3e} m "
      f"({drift.max() / AU_M:.3f} AU) over the run")
