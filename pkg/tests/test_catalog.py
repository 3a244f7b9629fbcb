import json

import numpy as np
import pytest

from orbitlab.catalog import (TASKS_BY_ID, build_catalog, catalog_manifest,
                              ground_truth, scenario_library)
from orbitlab.environment import BudgetObs, FullObs
from orbitlab.errors import ScenarioNotFoundError, ValidationError
from orbitlab.prompts import render_prompt
from orbitlab.scenario import scenario_from_elements
from orbitlab.solvers import SOLVER_BOUND_TASKS
from orbitlab.units import AU_M, M_SUN, YEAR_S


def test_scenario_library_shape():
    lib = scenario_library()
    assert len(lib) == 16
    ids = [s.id for s in lib]
    assert len(set(ids)) == len(ids)
    variants = {}
    for s in lib:
        variants.setdefault(s.force_law.variant, []).append(s.id)
    assert len(variants["modified_gravity"]) == 3
    assert len(variants["linear_drag"]) == 3


def test_alpha_task_pairs_only_with_modified(catalog):
    paired = {i.scenario_id for i in catalog.select(task_id="gravity-exponent")}
    assert paired == {"modified-gravity-a", "modified-gravity-b", "modified-gravity-c"}


def test_drag_task_pairs_only_with_drag(catalog):
    paired = {i.scenario_id for i in catalog.select(task_id="drag-timescale")}
    assert paired == {"drag-a", "drag-b", "drag-c"}


def test_alpha_on_newtonian_excluded_with_reason(catalog):
    reasons = [r for (t, s, r) in catalog.exclusions
               if t == "gravity-exponent" and s == "circular-equal"]
    assert reasons and "modified-gravity" in reasons[0]


def test_period_circular_ground_truth(catalog):
    inst = catalog.find("period", "circular-equal")
    assert inst.ground_truth == pytest.approx(2.23e7, rel=2e-3)
    assert inst.units == "s"


def test_alpha_ground_truth_exact(catalog):
    inst = catalog.find("gravity-exponent", "modified-gravity-a")
    assert inst.ground_truth == 0.03


def test_max_velocity_circular_kinematics(catalog):
    # circular closed form: v = 2 pi (a/2) / T for equal masses
    inst = catalog.find("max-speed-star1", "circular-equal")
    assert inst.ground_truth == pytest.approx(2.11e4, rel=2e-3)


def test_frac_accel_circular_convention():
    # |a| constant on a circular orbit: strict inequality yields 0
    sc = scenario_from_elements("conv-circ", M_SUN, M_SUN, AU_M, 0.0,
                                n_orbits=2, samples_per_orbit=2000)
    value, units = ground_truth(TASKS_BY_ID["frac-accel-below-mean"], sc)
    assert value == 0.0


def test_unit_variant_ground_truths_convert(catalog):
    si = catalog.find("period", "circular-equal")
    au = catalog.find("period", "circular-equal-au")
    assert au.ground_truth * YEAR_S == pytest.approx(si.ground_truth, rel=1e-9)
    m_si = catalog.find("mass-star1", "eccentric-moderate")
    m_cgs = catalog.find("mass-star1", "eccentric-moderate-cgs")
    assert m_cgs.ground_truth * 1e-3 == pytest.approx(m_si.ground_truth, rel=1e-9)


def test_every_instance_has_truth_and_binding(catalog):
    for inst in catalog.instances:
        assert inst.task.solver_binding in SOLVER_BOUND_TASKS
        if inst.task.answer_kind == "numeric":
            assert np.isfinite(inst.ground_truth)
        assert inst.window_end > 0


def test_catalog_deterministic(catalog):
    again = build_catalog()
    assert [(i.task.id, i.scenario_id) for i in again.instances] == \
        [(i.task.id, i.scenario_id) for i in catalog.instances]
    for a, b in zip(again.instances, catalog.instances):
        assert a.ground_truth == b.ground_truth


def test_unknown_lookup_raises(catalog):
    with pytest.raises(ScenarioNotFoundError):
        catalog.scenario("nope")
    with pytest.raises(ScenarioNotFoundError):
        catalog.find("period", "nope")


def test_manifest_round_trip(catalog, tmp_path):
    manifest = catalog_manifest(catalog)
    assert len(manifest["instances"]) == len(catalog.instances)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    loaded = json.loads(path.read_text())
    assert loaded["instances"][0]["threshold_pct"] >= 5.0


def test_duplicate_scenario_ids_rejected():
    sc = scenario_from_elements("dup", M_SUN, M_SUN, AU_M, 0.0,
                                n_orbits=1, samples_per_orbit=100)
    with pytest.raises(ValidationError):
        build_catalog(scenarios=[sc, sc])


class TestPrompts:
    def test_budget_prompt_window_clause(self, catalog):
        inst = catalog.find("total-energy", "circular-equal")
        sc = catalog.scenario("circular-equal")
        text = render_prompt(inst, BudgetObs(100), sc.unit_system)
        assert f"[0.0, {inst.window_end:.2e}] seconds" in text
        assert "up to a total of 100 times" in text
        assert "up to 10 times per observational request" in text
        assert "You must provide your answer in units of J." in text

    def test_full_prompt_units_line(self, catalog):
        inst = catalog.find("apoastron", "eccentric-moderate")
        sc = catalog.scenario("eccentric-moderate")
        text = render_prompt(inst, FullObs(), sc.unit_system)
        assert "You must provide your answer in units of m." in text
        assert "DataFrame `df`" in text
        assert "Observe" not in text

    def test_boolean_prompt_instructs_true_false(self, catalog):
        inst = catalog.find("is-bound", "unbound-flyby")
        sc = catalog.scenario("unbound-flyby")
        text = render_prompt(inst, BudgetObs(100), sc.unit_system)
        assert "either true or false" in text

    def test_unit_variant_prompt_names_units(self, catalog):
        inst = catalog.find("period", "circular-equal-au")
        sc = catalog.scenario("circular-equal-au")
        text = render_prompt(inst, BudgetObs(100), sc.unit_system)
        assert "in units of years and astronomical units" in text
        assert "You must provide your answer in units of yr." in text
