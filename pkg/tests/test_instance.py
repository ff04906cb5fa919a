import dataclasses
import json

import pytest

import bellsched as bs
from bellsched.instance import (
    GeneratorSpec,
    Instance,
    Route,
    School,
    TimeGrid,
    generate_instance,
    load_instance,
    save_instance,
    slot_clock,
)


def test_tiny_example_is_valid():
    inst = bs.tiny_example()
    assert bs.validate_instance(inst) == []
    assert len(inst.schools) == 2
    assert len(inst.am_routes()) == 2
    assert len(inst.pm_routes()) == 0


def test_validator_reports_each_breach():
    inst = bs.tiny_example()

    bad = dataclasses.replace(inst, grid=dataclasses.replace(inst.grid, slot_minutes=0))
    assert any("slot_minutes" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(inst, alpha=0, beta=1)
    assert any("alpha >= beta" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(inst, lam=2, mu=1)
    assert any("mu >= lambda" in m for m in bs.validate_instance(bad))

    s1, s2 = inst.schools
    bad = dataclasses.replace(inst, schools=(s2, s1))
    assert any("ids must be 1..N in order" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(
        inst, schools=(dataclasses.replace(s1, current_start=99), s2)
    )
    assert any("current_start 99 outside" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(
        inst, schools=(dataclasses.replace(s1, allowed_starts=(1,)), s2)
    )
    # beta = 1 makes slot 1 unreachable by any arrival
    assert any("allowed start 1 outside" in m for m in bs.validate_instance(bad))

    r = inst.routes[0]
    bad = dataclasses.replace(inst, routes=inst.routes + (dataclasses.replace(r),))
    assert any("duplicate route id" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(
        inst, routes=inst.routes + (dataclasses.replace(r, id=99, school=77),)
    )
    assert any("unknown school 77" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(
        inst, routes=inst.routes + (dataclasses.replace(r, id=99, period="XX"),)
    )
    assert any("period must be" in m for m in bs.validate_instance(bad))

    bad = dataclasses.replace(inst, grid=dataclasses.replace(inst.grid, pm_min=99))
    msgs = bs.validate_instance(bad)
    assert any("pm" in m for m in msgs)


def test_route_accessors_sorted_by_id():
    inst = bs.tiny_example()
    ids = [r.id for r in inst.am_routes()]
    assert ids == sorted(ids)
    for s in inst.schools:
        for r in inst.am_routes(s.id):
            assert r.school == s.id and r.period == "AM"
        for r in inst.pm_routes(s.id):
            assert r.school == s.id and r.period == "PM"


def test_slot_clock_rendering():
    grid = bs.tiny_example().grid
    grid = dataclasses.replace(grid, clock_origin=475, slot_minutes=5)
    assert slot_clock(grid, 5) == "8:15 AM"
    assert slot_clock(grid, 11) == "8:45 AM"
    assert slot_clock(grid, 18) == "9:20 AM"


# ---------------------------------------------------------------------------
# Generator
# ---------------------------------------------------------------------------

SCENARIO_SIZES = {"I": (15, 59), "II": (15, 59), "III": (15, 59), "IV": (30, 100)}


@pytest.mark.parametrize("scenario", ["I", "II", "III", "IV"])
def test_generated_instances_are_valid_and_sized(scenario):
    inst = generate_instance(GeneratorSpec(scenario=scenario), seed=3)
    assert bs.validate_instance(inst) == []
    n, routes = SCENARIO_SIZES[scenario]
    assert len(inst.schools) == n
    assert len(inst.am_routes()) == routes
    assert len(inst.pm_routes()) == routes
    for s in inst.schools:
        # every school runs at least one route in each half of the day
        assert inst.am_routes(s.id)
        assert inst.pm_routes(s.id)
        # morning and afternoon service are drawn to the same per-school count
        assert len(inst.am_routes(s.id)) == len(inst.pm_routes(s.id))
        assert s.day_length in (78, 81, 90)
        assert s.allowed_starts == tuple(range(5, 19))
    for r in inst.routes:
        assert 5 <= r.duration_slots <= 13
    am_ids = [r.id for r in inst.am_routes()]
    pm_ids = [r.id for r in inst.pm_routes()]
    assert am_ids == list(range(1, routes + 1))
    assert pm_ids == list(range(routes + 1, 2 * routes + 1))


def test_generator_current_start_patterns():
    one = generate_instance(GeneratorSpec(scenario="I"), seed=0)
    assert {s.current_start for s in one.schools} == {11}

    two = generate_instance(GeneratorSpec(scenario="II"), seed=0)
    assert {s.current_start for s in two.schools} == {18}

    three = generate_instance(GeneratorSpec(scenario="III"), seed=0)
    currents = [s.current_start for s in three.schools]
    assert currents == [5] * 5 + [11] * 5 + [18] * 5

    four = generate_instance(GeneratorSpec(scenario="IV"), seed=0)
    assert {s.current_start for s in four.schools} == {11}


def test_generator_determinism_and_seed_sensitivity():
    a = generate_instance(GeneratorSpec(scenario="III"), seed=42)
    b = generate_instance(GeneratorSpec(scenario="III"), seed=42)
    assert a == b
    c = generate_instance(GeneratorSpec(scenario="III"), seed=43)
    assert a != c


def test_generator_reduced_scale():
    inst = generate_instance(GeneratorSpec(scenario="III", schools=6, am_routes=20), seed=1)
    assert bs.validate_instance(inst) == []
    assert len(inst.schools) == 6
    assert len(inst.am_routes()) == 20
    assert len(inst.pm_routes()) == 20
    currents = [s.current_start for s in inst.schools]
    assert currents == [5, 5, 11, 11, 18, 18]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_json_round_trip_is_byte_identical(tmp_path):
    inst = generate_instance(GeneratorSpec(scenario="II"), seed=9)
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_instance(inst, p1)
    again = load_instance(p1)
    assert again == inst
    save_instance(again, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_unknown_field(tmp_path):
    inst = bs.tiny_example()
    p = tmp_path / "inst.json"
    save_instance(inst, p)
    doc = json.loads(p.read_text())
    doc["schools"][0]["transition"] = 3
    p.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="transition"):
        load_instance(p)


def test_load_rejects_missing_field_and_bad_version(tmp_path):
    inst = bs.tiny_example()
    p = tmp_path / "inst.json"
    save_instance(inst, p)
    doc = json.loads(p.read_text())
    del doc["schools"][0]["day_length"]
    p.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="day_length"):
        load_instance(p)

    save_instance(inst, p)
    doc = json.loads(p.read_text())
    doc["version"] = 2
    p.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="version"):
        load_instance(p)


def test_load_rejects_bool_where_int_expected(tmp_path):
    inst = bs.tiny_example()
    p = tmp_path / "inst.json"
    save_instance(inst, p)
    doc = json.loads(p.read_text())
    doc["schools"][0]["day_length"] = True
    p.write_text(json.dumps(doc))
    with pytest.raises(ValueError):
        load_instance(p)


def test_restrict_starts_keeps_other_fields():
    inst = bs.tiny_example()
    sub = inst.restrict_starts({1: (3, 4)})
    assert sub.schools[0].allowed_starts == (3, 4)
    assert sub.schools[1].allowed_starts == inst.schools[1].allowed_starts
    assert sub.routes == inst.routes
    assert bs.validate_instance(sub) == []
