import math

import pytest

import sbrsp

SMALL = {"students": 8, "schools": 2, "buses": 2, "area_km": 2.0, "network_nodes": 16, "stop_density": 2.0}
QUICK = {"node_limit": 50}


def test_generate_validate_round_trip():
    inst = sbrsp.generate(SMALL, seed=3)
    again = sbrsp.validate(inst)
    assert again == sbrsp.validate(again)
    assert len(again["students"]) == 8


def test_solve_and_metrics():
    inst = sbrsp.generate(SMALL, seed=3)
    sol = sbrsp.solve(inst, config=QUICK)
    assert sol["status"] == "ok"
    assert len(sol["legs"]) == sum(1 for s in inst["students"] if s.get("rides_bus", True))
    m = sbrsp.metrics(inst, sol)
    assert m["riders"] == len(sol["legs"])
    assert m["total_stt_min"] >= m["total_brts_min"]


def test_same_seed_same_solution():
    inst = sbrsp.generate(SMALL, seed=5)
    assert sbrsp.solve(inst, config=QUICK) == sbrsp.solve(inst, config=QUICK)


def test_mode_choice_helpers():
    A, achieved = sbrsp.calibrate_A([300.0, 300.0], 1.5)
    assert A == pytest.approx(math.log(3) / 300, rel=1e-9)
    assert achieved == pytest.approx(1.5)
    assert sbrsp.choice_probability(A, 600.0, 300.0) == pytest.approx(0.75)
    assert sbrsp.bpr_time(100.0, 2.0, 1.0) == pytest.approx(340.0)
    assert sbrsp.percent_change(13413.87, 8436.92) == pytest.approx(37.10, abs=0.01)


def test_errors_carry_their_kind():
    with pytest.raises(sbrsp.SbrspError) as info:
        sbrsp.calibrate_A([-300.0, -300.0], 2.0)
    assert info.value.kind == "calibration"
    with pytest.raises(sbrsp.SbrspError) as info:
        sbrsp.validate("{not json")
    assert info.value.kind == "parse"
    with pytest.raises(sbrsp.SbrspError) as info:
        sbrsp.validate({"network": {}})
    assert info.value.kind == "validation"
