"""
Deriving task thresholds and scoring answers
============================================

Task thresholds come from the gap between the full-data expert and the
uniform-sampling baseline: easy-with-uniform-sampling tasks get the strict 5%
floor, hopeless-with-uniform-sampling tasks get the 70% cap.
"""

import warnings

from orbitlab import build_catalog, compute_threshold, score_answer
from orbitlab.catalog import TASKS_BY_ID
from orbitlab.evaluation import detect_mass_assumption

catalog = build_catalog()

for tid in ("period", "max-speed-star1", "gravity-exponent"):
    task = TASKS_BY_ID[tid]
    scenarios = [catalog.scenario(i.scenario_id)
                 for i in catalog.select(task_id=tid)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        thr = compute_threshold(task, scenarios)
    print(f"{tid:20s} derived threshold {thr:5.1f}%  (shipped {task.threshold_pct}%)")

# scoring applies unit conversion before the threshold comparison
inst = catalog.find("periastron", "eccentric-moderate")
print(f"\nperiastron truth: {inst.ground_truth:.4e} {inst.units}, "
      f"threshold {inst.task.threshold_pct}%")
for submission in ((inst.ground_truth * 1.03, "m"),
                   (inst.ground_truth * 1.03 / 1000.0, "km"),
                   (inst.ground_truth * 1.20, "m")):
    print(f"  submit {submission[0]:.4e} {submission[1]:3s} -> "
          f"{'correct' if score_answer(inst, submission) else 'incorrect'}")

# transcripts are scanned for unjustified mass-assignment shortcuts
shortcut = "star1_mass = 1.0\nE = 0.5 * star1_mass * v1**2"
found, patterns = detect_mass_assumption(shortcut)
print(f"\nmass-assumption scan on a shortcut solution: found={found}, "
      f"patterns={patterns}")
