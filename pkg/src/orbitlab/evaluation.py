"""Threshold derivation, answer scoring, transcript analysis, and reporting."""

from __future__ import annotations

import json
import math
import re
import statistics
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .catalog import Catalog, TaskInstance, TaskSpec, build_catalog
from .environment import FullObs, create_session
from .errors import OrbitLabError, UnitError
from .solvers import solve_full, solve_uniform
from .units import convert_value

THRESHOLD_FLOOR = 5.0
THRESHOLD_CAP = 70.0
REFERENCE_N = 100


# --- thresholds ---------------------------------------------------------------------


def _full_rows(scenario):
    return create_session(scenario, FullObs()).full_table()


def _pair_gap(task: TaskSpec, scenario) -> float:
    """Percent gap between the expert-ref-100 and full-data expert answers."""
    full = solve_full(task, _full_rows(scenario), scenario.unit_system)
    unif = solve_uniform(task, scenario, REFERENCE_N)
    if task.answer_kind == "boolean":
        return 0.0 if bool(full.value) == bool(unif.value) else 100.0
    if full.value == 0:
        return 0.0 if unif.value == 0 else math.inf
    return abs(unif.value - full.value) / abs(full.value) * 100.0


def compute_threshold(task: TaskSpec, scenarios) -> float:
    """Task threshold from the uniform-sampling performance gap.

    Median per-pair gap, clamped into [5, 70]: tasks uniform sampling solves
    nearly as well as full data get the strict 5% floor, while tasks where it
    fails dramatically are capped at a lenient-but-achievable 70%. Solver
    failures exclude the pair with a warning; with no usable pairs the cap
    applies.
    """
    gaps = []
    for sc in scenarios:
        try:
            gaps.append(_pair_gap(task, sc))
        except OrbitLabError as exc:
            warnings.warn(f"threshold pair {task.id} x {sc.id} excluded: {exc}",
                          stacklevel=2)
    if not gaps:
        return THRESHOLD_CAP
    gap = float(np.median(gaps))
    return min(THRESHOLD_CAP, max(THRESHOLD_FLOOR, gap))


# --- scoring ------------------------------------------------------------------------


def _normalize_submission(instance: TaskInstance, submitted):
    """(value, units) from the accepted submission shapes. Unrecognized
    shapes pass through so the scorer can flag them as format errors."""
    if isinstance(submitted, bool):
        return submitted, ""
    if isinstance(submitted, (int, float)):
        return float(submitted), instance.units
    try:
        value, units = submitted
    except (TypeError, ValueError):
        return submitted, ""
    return value, units


def score_answer_detailed(instance: TaskInstance, submitted) -> Tuple[bool, str]:
    """(correct, flag). Unit failures score incorrect with a flag; non-finite
    numbers are a format error flag."""
    task = instance.task
    value, units = _normalize_submission(instance, submitted)

    if task.answer_kind == "boolean":
        if not isinstance(value, bool):
            return False, "format: boolean task requires true/false"
        return value == instance.ground_truth, ""

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False, "format: numeric task requires a number"
    if not math.isfinite(value):
        return False, "format: non-finite value"
    try:
        converted = convert_value(float(value), units or instance.units, instance.units)
    except UnitError as exc:
        return False, f"units: {exc}"

    truth = instance.ground_truth
    if truth == 0:
        tol = task.zero_truth_abs_tol
        if tol is None:
            return False, "scoring: zero ground truth without declared tolerance"
        return abs(converted) <= tol, ""
    rel_pct = abs(converted - truth) / abs(truth) * 100.0
    return rel_pct <= task.threshold_pct, ""


def score_answer(instance: TaskInstance, submitted) -> bool:
    """Correct iff the relative error is within the task threshold (boolean
    tasks: exact match). Units are converted before comparison."""
    correct, _ = score_answer_detailed(instance, submitted)
    return correct


# --- mass-assumption detection ---------------------------------------------------------

# Verbatim shortcut patterns, matched whitespace-tolerantly inside
# agent-authored code. Word boundaries keep m2 from matching m2_est.
MASS_ASSUMPTION_PATTERNS = [
    r"\(\s*df\[['\"]star1_x['\"]\]\s*\+\s*df\[['\"]star2_x['\"]\]\s*\)\s*/\s*2",
    r"\bstar1_mass\s*=\s*1\.0\b",
    r"\bstar2_mass\s*=\s*1\.0\b",
    r"\bm1\s*=\s*m2\b",
    r"\bm1\s*=\s*1\.0\b",
    r"\bm2\s*=\s*1\.0\b",
]
_MASS_RES = [re.compile(p) for p in MASS_ASSUMPTION_PATTERNS]


def _agent_text(transcript: str) -> str:
    """Concatenated agent-authored content from a transcript.

    Transcripts are line-delimited JSON records with a ``role`` field; only
    agent records count, so patterns quoted in environment-authored prompt
    text are ignored. Non-JSON input is treated as raw agent code.
    """
    chunks = []
    structured = False
    for line in transcript.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(rec, dict) and "role" in rec:
            structured = True
            if rec.get("role") == "agent":
                chunks.append(str(rec.get("content", "")))
                payload = rec.get("payload")
                if payload is not None:
                    chunks.append(json.dumps(payload))
    if structured:
        return "\n".join(chunks)
    return transcript


def detect_mass_assumption(transcript: str):
    """(found, matched_patterns) for unjustified mass-assignment shortcuts."""
    text = _agent_text(transcript)
    matched = [p.pattern for p in _MASS_RES if p.search(text)]
    return bool(matched), matched


# --- baseline gap report ------------------------------------------------------------------


@dataclass
class GapRow:
    task_id: str
    scenario_id: str
    n: Union[int, str]
    gap_pct: float


@dataclass
class GapReport:
    rows: List[GapRow]
    thresholds: dict

    def to_json(self):
        return json.dumps({
            "rows": [vars(r) for r in self.rows],
            "thresholds": self.thresholds,
        }, indent=2)

    def to_csv(self):
        lines = ["task,scenario,n,gap_pct"]
        for r in self.rows:
            lines.append(f"{r.task_id},{r.scenario_id},{r.n},{r.gap_pct!r}")
        return "\n".join(lines) + "\n"

    def render_plot(self, path):
        """Static per-task scatter of gaps with the chosen threshold lines."""
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        tasks = sorted({r.task_id for r in self.rows})
        fig, ax = plt.subplots(figsize=(max(8, 0.8 * len(tasks)), 5))
        for i, task in enumerate(tasks):
            gaps = [r.gap_pct for r in self.rows if r.task_id == task
                    and math.isfinite(r.gap_pct)]
            ax.scatter([i] * len(gaps), gaps, s=14, color="k", alpha=0.6, zorder=3)
            thr = self.thresholds.get(task)
            if thr is not None:
                ax.hlines(thr, i - 0.35, i + 0.35, color="crimson", zorder=4)
        ax.set_yscale("log")
        ax.set_xticks(range(len(tasks)))
        ax.set_xticklabels(tasks, rotation=45, ha="right")
        ax.set_ylabel("percent gap vs full-data expert")
        ax.set_title("uniform-sampling gaps and chosen thresholds")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return Path(path)


def baseline_gap_report(n_values, catalog: Optional[Catalog] = None,
                        plot_path=None) -> GapReport:
    """Per-pair |expert-ref-N - expert-ref-full| percentage gaps grouped by
    task, for each N, plus the shipped thresholds. Optionally renders a plot."""
    cat = build_catalog() if catalog is None else catalog
    rows = []
    seen_tasks = {}
    for inst in cat.instances:
        sc = cat.scenario(inst.scenario_id)
        seen_tasks[inst.task.id] = inst.task
        full = solve_full(inst.task, _full_rows(sc), sc.unit_system)
        for n in n_values:
            try:
                if n == "full":
                    est = solve_full(inst.task, _full_rows(sc), sc.unit_system)
                else:
                    est = solve_uniform(inst.task, sc, int(n))
                if inst.task.answer_kind == "boolean":
                    gap = 0.0 if bool(est.value) == bool(full.value) else 100.0
                elif full.value == 0:
                    gap = 0.0 if est.value == 0 else math.inf
                else:
                    gap = abs(est.value - full.value) / abs(full.value) * 100.0
            except OrbitLabError:
                gap = math.inf
            rows.append(GapRow(inst.task.id, inst.scenario_id, n, gap))
    thresholds = {tid: task.threshold_pct for tid, task in seen_tasks.items()}
    report = GapReport(rows, thresholds)
    if plot_path is not None:
        report.render_plot(plot_path)
    return report


# --- run records and aggregation --------------------------------------------------------------


@dataclass
class RunRecord:
    task_id: str
    scenario_id: str
    agent_id: str
    protocol: str
    submitted_value: Union[float, bool, None]
    submitted_units: str
    observations_used: int
    wall_time: float
    transcript_ref: str
    correct: bool
    repeat: int = 0
    flag: str = ""
    cost: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(vars(self))

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls(**json.loads(line))


def append_records(records, path):
    """Append run records to a line-delimited file (atomic per line)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
            fh.flush()


def load_records(path) -> List[RunRecord]:
    return [RunRecord.from_json(line)
            for line in Path(path).read_text().splitlines() if line.strip()]


@dataclass
class Report:
    agent_id: str
    score_pct: float
    standard_error_pct: Optional[float]
    mean_observations: Optional[float]
    repeats: int
    n_instances: int
    per_task: dict = field(default_factory=dict)
    total_cost: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps({
            "agent": self.agent_id,
            "score_pct": self.score_pct,
            "standard_error_pct": self.standard_error_pct,
            "mean_observations": self.mean_observations,
            "repeats": self.repeats,
            "n_instances": self.n_instances,
            "per_task": self.per_task,
            "total_cost": self.total_cost,
        }, indent=2)

    def to_text(self) -> str:
        se = ("-" if self.standard_error_pct is None
              else f"{self.standard_error_pct:.1f}%")
        obs = ("-" if self.mean_observations is None
               else f"{self.mean_observations:.1f}")
        lines = [
            f"agent: {self.agent_id}",
            f"score: {self.score_pct:.1f}% +/- {se}  "
            f"(repeats={self.repeats}, instances={self.n_instances})",
            f"mean observations used: {obs}",
            "per-task:",
        ]
        for tid in sorted(self.per_task):
            lines.append(f"  {tid:28s} {self.per_task[tid] * 100:5.1f}%")
        return "\n".join(lines)


def aggregate(runs: List[RunRecord], repeats: Optional[int] = None) -> List[Report]:
    """Per-agent score with standard error over repeats and mean observations.

    Score per repeat is the fraction of instances answered correctly; the
    standard error requires at least two repeats and is otherwise absent.
    Mismatched repeat coverage triggers a partial-aggregation warning.
    """
    reports = []
    agents = sorted({r.agent_id for r in runs})
    for agent in agents:
        mine = [r for r in runs if r.agent_id == agent]
        by_repeat = {}
        for r in mine:
            by_repeat.setdefault(r.repeat, []).append(r)
        sizes = {len(v) for v in by_repeat.values()}
        if len(sizes) > 1:
            warnings.warn(f"agent {agent}: repeats cover different instance "
                          f"counts {sorted(sizes)}; aggregating anyway",
                          stacklevel=2)
        scores = [100.0 * sum(r.correct for r in v) / len(v)
                  for v in by_repeat.values()]
        mean_score = float(np.mean(scores))
        se = (float(statistics.stdev(scores) / math.sqrt(len(scores)))
              if len(scores) >= 2 else None)
        obs = [r.observations_used for r in mine if r.protocol == "budget_obs"]
        mean_obs = float(np.mean(obs)) if obs else None
        per_task = {}
        for tid in sorted({r.task_id for r in mine}):
            sel = [r.correct for r in mine if r.task_id == tid]
            per_task[tid] = sum(sel) / len(sel)
        costs = [r.cost for r in mine if r.cost is not None]
        total_cost = float(np.sum(costs)) if costs else None
        reports.append(Report(agent, mean_score, se, mean_obs,
                              repeats=len(by_repeat),
                              n_instances=max(sizes) if sizes else 0,
                              per_task=per_task, total_cost=total_cost))
    return reports
