import dataclasses
import math

import pytest

import bellsched as bs
from bellsched.equity import (
    abs_deviation_matrix,
    custom_matrix,
    evaluate,
    price_of_fairness,
    scenario4_matrix,
)


def test_abs_deviation_minutes_and_slots():
    inst = bs.tiny_example()
    c = abs_deviation_matrix(inst)  # minutes is the default unit
    s = inst.schools[0]
    m_hat = s.current_start
    assert c.value(s.id, m_hat) == 0.0
    assert c.value(s.id, m_hat - 1) == inst.grid.slot_minutes
    assert c.value(s.id, m_hat + 2) == 2 * inst.grid.slot_minutes

    slots = abs_deviation_matrix(inst, unit="slots")
    assert slots.value(s.id, m_hat + 2) == 2.0

    with pytest.raises(ValueError):
        abs_deviation_matrix(inst, unit="hours")


def test_scenario4_penalizes_early_superlinearly():
    inst = bs.tiny_example()
    # current start 6 leaves room for a 4-slot early move on a 6-slot grid
    s1 = dataclasses.replace(inst.schools[0], current_start=6)
    inst = dataclasses.replace(inst, schools=(s1, inst.schools[1]))
    c = scenario4_matrix(inst)

    assert abs(c.value(1, 5) - 1.0) <= 1e-9
    assert abs(c.value(1, 4) - 2.378414230005442) <= 1e-9
    assert abs(c.value(1, 2) - 5.656854249492381) <= 1e-9
    # late moves cost their slot count linearly; no move costs nothing
    assert c.value(1, 6) == 0.0
    assert c.value(2, 5) == 1.0  # school 2 still starts at 4; 5 is one late
    assert c.value(2, 6) == 2.0

    for m in range(inst.beta + 1, inst.grid.am_slots + 1):
        early = 6 - m
        if early > 0:
            assert abs(c.value(1, m) - early**1.25) <= 1e-9


def test_custom_matrix_requires_full_nonnegative_coverage():
    inst = bs.tiny_example()
    full = {
        (s.id, m): float(abs(m - s.current_start))
        for s in inst.schools
        for m in range(inst.beta + 1, inst.grid.am_slots + 1)
    }
    c = custom_matrix(inst, full)
    assert c.value(1, 2) == 2.0

    missing = dict(full)
    del missing[(2, 5)]
    with pytest.raises(ValueError, match=r"\(2, 5\)"):
        custom_matrix(inst, missing)

    negative = dict(full)
    negative[(1, 3)] = -0.5
    with pytest.raises(ValueError, match="negative"):
        custom_matrix(inst, negative)


def test_evaluate_summary_statistics():
    inst = bs.tiny_example()
    c = abs_deviation_matrix(inst)
    rep = bs.solve_base(inst)
    sched = rep.schedule
    # force the known optimal starts so the numbers below are pinned
    assert sched.start == {1: 2, 2: 4}
    eq = evaluate(inst, sched, c)
    assert eq.pi == {1: 10.0, 2: 0.0}
    assert eq.sorted_desc == (10.0, 0.0)
    assert eq.pi_max == 10.0
    assert eq.total == 10.0
    assert eq.avg_abs_change_minutes == 5.0
    assert abs(eq.std_abs_change_minutes - 5.0) <= 1e-12
    assert eq.histogram == {0: 1, 10: 1}

    d = eq.to_dict()
    assert d["pi_max"] == 10.0
    assert d["avg_abs_change_minutes"] == 5.0
    assert d["pi"] == {"1": 10.0, "2": 0.0}


def test_evaluate_std_is_population_std():
    inst = bs.tiny_example()
    c = abs_deviation_matrix(inst)
    rep = bs.solve_minimax(inst, c, 1)
    eq = evaluate(inst, rep.schedule, c)
    changes = [
        abs(rep.schedule.start[s.id] - s.current_start) * inst.grid.slot_minutes
        for s in inst.schools
    ]
    mean = sum(changes) / len(changes)
    want = math.sqrt(sum((x - mean) ** 2 for x in changes) / len(changes))
    assert abs(eq.std_abs_change_minutes - want) <= 1e-12
    assert eq.avg_abs_change_minutes == mean


def test_price_of_fairness():
    assert price_of_fairness(2.0, 1.0) == 1.0
    assert price_of_fairness(1.0, 1.0) == 0.0
    assert price_of_fairness(3.0, 2.0) == 0.5
    with pytest.raises(ValueError):
        price_of_fairness(1.0, 0.0)
    with pytest.raises(ValueError):
        price_of_fairness(1.0, -2.0)
