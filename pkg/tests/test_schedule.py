import pytest

import bellsched as bs
from bellsched.schedule import (
    Schedule,
    check_schedule_shape,
    schedule_from_dict,
    schedule_to_dict,
)


def _solved_toy():
    inst = bs.tiny_example()
    rep = bs.solve_base(inst)
    return inst, rep.schedule


def test_dict_round_trip():
    inst, sched = _solved_toy()
    doc = schedule_to_dict(sched)
    back = schedule_from_dict(doc)
    assert back == sched
    # keys in the wire format are strings so the document is plain JSON
    assert all(isinstance(k, str) for k in doc["start"])


def test_shape_check_catches_missing_school():
    inst, sched = _solved_toy()
    broken = Schedule(
        start={1: sched.start[1]},
        end={1: sched.end[1]},
        am_arrival=sched.am_arrival,
        pm_departure=sched.pm_departure,
        buses=sched.buses,
    )
    with pytest.raises(ValueError, match="missing \\[2\\]"):
        check_schedule_shape(inst, broken)


def test_shape_check_catches_route_mismatch():
    inst, sched = _solved_toy()
    arrivals = dict(sched.am_arrival)
    del arrivals[next(iter(arrivals))]
    broken = Schedule(
        start=sched.start, end=sched.end, am_arrival=arrivals,
        pm_departure=sched.pm_departure, buses=sched.buses,
    )
    with pytest.raises(ValueError, match="morning routes"):
        check_schedule_shape(inst, broken)


def test_shape_check_catches_wrong_end():
    inst, sched = _solved_toy()
    ends = dict(sched.end)
    ends[1] = ends[1] + 1
    broken = Schedule(
        start=sched.start, end=ends, am_arrival=sched.am_arrival,
        pm_departure=sched.pm_departure, buses=sched.buses,
    )
    with pytest.raises(ValueError):
        check_schedule_shape(inst, broken)
