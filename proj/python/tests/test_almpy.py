import os
import pathlib

import pytest

import almpy

CORPUS = pathlib.Path(os.environ.get("ALM_CORPUS_DIR", pathlib.Path(__file__).resolve().parents[2] / "corpus"))
LIB = [str(CORPUS / "lib")]


def test_t0_states_and_transitions():
    s = almpy.System(str(CORPUS / "t0.alm"))
    assert s.model_count == 1
    states = s.states()
    assert len(states) == 6
    assert sum("dom_f(x)=false" in st for st in states) == 2
    arcs = s.transitions()
    assert all(isinstance(a, tuple) and len(a) == 3 for a in arcs)
    assert any(acts == ["b"] for _, acts, _ in arcs)


def test_alice_has_three_models():
    s = almpy.System(str(CORPUS / "professors.alm"))
    assert sorted(s.labels) == ["alice:assistant", "alice:associate", "alice:full"]


def test_well_foundedness():
    assert almpy.System(str(CORPUS / "n_w_f.alm")).well_founded() == "not well-founded"
    assert almpy.System(str(CORPUS / "t0.alm")).well_founded() == "well-founded"


def test_projection_and_entailment():
    s = almpy.System(str(CORPUS / "monkey.alm"), lib=LIB)
    history = (CORPUS / "monkey_gamma1.hist").read_text()
    trajectories = s.project(history)
    assert len(trajectories) == 1
    assert trajectories[0]["actions"] == [["move(initial_box)"]]
    assert s.entails(history, "loc_in(monkey) = initial_box", 1)


def test_planning_includes_the_printed_plan():
    s = almpy.System(str(CORPUS / "monkey.alm"), lib=LIB)
    plans = s.plan((CORPUS / "monkey.goal").read_text(), 6, history=(CORPUS / "monkey_gamma_mb.hist").read_text())
    flat = [[a for step in p for a in step] for p in plans]
    assert ["move(initial_box)", "grasp(box)", "carry(box,under_banana)", "release(box)", "climb(box)",
            "grasp(banana)"] in flat


def test_flatten_and_format():
    text = almpy.flatten(str(CORPUS / "motion.alm"))
    assert text.startswith("theory flat_motion")
    assert almpy.format_text(text) == text


def test_errors_carry_locations():
    with pytest.raises(almpy.AlmError) as e:
        almpy.check_text("theory t\n  module m\n    sort declarations\n      a : universe\n")
    assert e.value.kind == "input"
    assert e.value.line == 4
    with pytest.raises(almpy.AlmError) as e:
        almpy.System(str(CORPUS / "negative" / "unknown_function.alm"))
    assert e.value.kind == "semantic"
    assert e.value.message == "unknown function nope"


def test_budget_errors():
    with pytest.raises(almpy.AlmError) as e:
        almpy.System(str(CORPUS / "travel.alm")).states(budget_nodes=5)
    assert e.value.kind == "budget"
