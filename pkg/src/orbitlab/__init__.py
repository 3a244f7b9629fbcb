"""orbitlab: a two-body gravitational discovery environment.

A machine-precision binary-star simulator with configurable force laws
(including out-of-distribution physics), budgeted partial-observation
protocols, expert reference solvers, and an evaluation harness for scoring
external agents against task-specific thresholds.
"""

from .bodies import (BodyState, LinearDrag, ModifiedGravity, Newtonian,
                     Vector3)
from .catalog import (Catalog, TaskInstance, TaskSpec, TASKS, build_catalog,
                      ground_truth, scenario_library)
from .dynamics import accelerations, total_energy
from .elements import OrbitalElements, orbital_elements
from .environment import (BudgetObs, FullObs, ObservationRow,
                          ObservationSession, create_session, full_table,
                          observe)
from .evaluation import (RunRecord, Report, aggregate, baseline_gap_report,
                         compute_threshold, detect_mass_assumption,
                         score_answer)
from .integrators import step_adaptive
from .kepler import step_fixed
from .prompts import render_prompt
from .scenario import Scenario, load_scenario, save_scenario, scenario_from_elements
from .solvers import (Estimate, KinematicSeries, adaptive_extremum,
                      fit_drag_timescale, fit_gravity_exponent, infer_masses,
                      kinematics, planned_gravity_exponent, solve_full,
                      solve_uniform)
from .trajectory import DenseTrajectory, simulate, write_trajectory_csv
from .units import AU_YR_MSUN, CGS, G_SI, SI, UnitSystem

__version__ = "0.1.0"

__all__ = [
    "AU_YR_MSUN", "BodyState", "BudgetObs", "CGS", "Catalog",
    "DenseTrajectory", "Estimate", "FullObs", "G_SI", "KinematicSeries",
    "LinearDrag", "ModifiedGravity", "Newtonian", "ObservationRow",
    "ObservationSession", "OrbitalElements", "Report", "RunRecord", "SI",
    "Scenario", "TaskInstance", "TaskSpec", "TASKS", "UnitSystem", "Vector3",
    "accelerations", "adaptive_extremum", "aggregate", "baseline_gap_report",
    "build_catalog", "compute_threshold", "create_session",
    "detect_mass_assumption", "fit_drag_timescale", "fit_gravity_exponent",
    "full_table", "ground_truth", "infer_masses", "kinematics",
    "load_scenario", "observe", "orbital_elements", "planned_gravity_exponent",
    "render_prompt", "save_scenario", "scenario_from_elements",
    "scenario_library", "score_answer", "simulate", "solve_full",
    "solve_uniform", "step_adaptive", "step_fixed", "total_energy",
    "write_trajectory_csv",
]
