import random

from hypothesis import given, settings
from hypothesis import strategies as st

import bellsched as bs
from bellsched.fleet import CSV_HEADER, assign_buses, min_buses, occupancy
from bellsched.instance import Instance, Route, School, TimeGrid

from conftest import random_schedule, random_tiny


def _three_interval_instance():
    """One school, three morning routes whose operating intervals are
    [1,3], [2,4], [5,6] when the school starts at slot 6."""
    grid = TimeGrid(slot_minutes=5, am_slots=6, pm_min=7, pm_max=7, clock_origin=475)
    school = School(id=1, label="A", current_start=6, day_length=1,
                    allowed_starts=(6,))
    routes = (
        Route(id=1, school=1, period="AM", duration_slots=3),
        Route(id=2, school=1, period="AM", duration_slots=3),
        Route(id=3, school=1, period="AM", duration_slots=2),
    )
    inst = Instance(grid=grid, alpha=5, beta=0, lam=0, mu=0,
                    schools=(school,), routes=routes)
    assert bs.validate_instance(inst) == []
    sched = bs.Schedule(
        start={1: 6}, end={1: 7},
        am_arrival={1: 3, 2: 4, 3: 6},
        pm_departure={},
        buses=2,
    )
    bs.check_schedule_shape(inst, sched)  # raises on a malformed schedule
    return inst, sched


def test_occupancy_profile_and_peak():
    inst, sched = _three_interval_instance()
    prof = occupancy(inst, sched)
    assert prof.am == (1, 2, 2, 1, 1, 1)  # slots 1..6
    assert prof.pm == (0,)
    assert prof.am_peak == 2
    assert prof.peak == 2
    assert min_buses(inst, sched) == 2


def test_assign_buses_reuses_freed_bus():
    inst, sched = _three_interval_instance()
    roster = assign_buses(inst, sched)
    assert roster.fleet_size == 2
    by_route = {row[0]: row for row in roster.rows}
    assert by_route[1][3:5] == (1, 3)
    assert by_route[2][3:5] == (2, 4)
    assert by_route[3][3:5] == (5, 6)
    assert by_route[1][5] == 1
    assert by_route[2][5] == 2
    # route 3 starts after route 1 ends, so the first bus comes back
    assert by_route[3][5] == 1


def test_assignment_csv_golden():
    inst, sched = _three_interval_instance()
    roster = assign_buses(inst, sched)
    text = roster.to_csv_text()
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert lines[0] == "route_id,school_id,period,start_slot,end_slot,bus_id"
    assert lines[1] == "1,1,AM,1,3,1"
    assert lines[2] == "2,1,AM,2,4,2"
    assert lines[3] == "3,1,AM,5,6,1"


def test_occupancy_clips_to_grid():
    # arrival at slot 1 with a 3-slot route: only slot 1 is on the grid
    grid = TimeGrid(slot_minutes=5, am_slots=4, pm_min=5, pm_max=5, clock_origin=475)
    school = School(id=1, label="A", current_start=1, day_length=1,
                    allowed_starts=(1,))
    inst = Instance(grid=grid, alpha=0, beta=0, lam=0, mu=0, schools=(school,),
                    routes=(Route(id=1, school=1, period="AM", duration_slots=3),))
    sched = bs.Schedule(start={1: 1}, end={1: 2}, am_arrival={1: 1},
                        pm_departure={}, buses=1)
    prof = occupancy(inst, sched)
    assert prof.am == (1, 0, 0, 0)
    assert prof.peak == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_assignment_matches_peak_and_never_overlaps(seed):
    rng = random.Random(seed)
    inst = random_tiny(rng)
    sched = random_schedule(inst, rng)

    peak = occupancy(inst, sched).peak
    assert min_buses(inst, sched) == peak

    roster = assign_buses(inst, sched)
    assert roster.fleet_size == peak

    # no bus may run two routes at once within a half-day; the unclipped
    # timeline is the check, so stretch intervals past the grid edges too
    for period in ("AM", "PM"):
        spans = {}
        for rid, school, per, lo, hi, bus in roster.rows:
            if per != period:
                continue
            spans.setdefault(bus, []).append((lo, hi))
        for bus, ivals in spans.items():
            ivals.sort()
            for (a1, b1), (a2, b2) in zip(ivals, ivals[1:]):
                assert b1 < a2, f"bus {bus} overlaps: {(a1, b1)} and {(a2, b2)}"


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_unclipped_rows_cover_full_durations(seed):
    rng = random.Random(seed)
    inst = random_tiny(rng)
    sched = random_schedule(inst, rng)
    durs = {r.id: r.duration_slots for r in inst.routes}
    for rid, school, per, lo, hi, bus in assign_buses(inst, sched).rows:
        assert hi - lo + 1 == durs[rid]
