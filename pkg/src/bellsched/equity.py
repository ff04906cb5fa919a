"""Disutility matrices and equity reporting for start-time changes.

A disutility matrix assigns every school n and every candidate start slot m a
nonnegative cost c[n][m] for moving that school's bell from its current slot
to m. Matrices cover the whole feasible start range beta+1..am_slots, not
just the allowed set, so models and engines can read any slot they price.

Built-in families:

abs_deviation_matrix
    |m - current| in slot units, or scaled by slot_minutes for minutes.
scenario4_matrix
    Asymmetric cost in slot units: earlier starts hurt more than later ones,
    (current - m) ** 1.25 when moving earlier, (m - current) when moving
    later, 0 for staying put.
custom_matrix
    Caller-supplied values; must cover the full school x slot domain.

evaluate() turns a schedule plus matrix into an EquityReport; the average and
standard deviation of |change| are always reported in minutes regardless of
the matrix unit, so reports from different matrices stay comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .instance import Instance
from .schedule import Schedule, check_schedule_shape

__all__ = [
    "DisutilityMatrix",
    "EquityReport",
    "abs_deviation_matrix",
    "scenario4_matrix",
    "custom_matrix",
    "evaluate",
    "price_of_fairness",
]


@dataclass(frozen=True)
class DisutilityMatrix:
    """values[(n, m)] -> cost; unit is 'slots', 'minutes', or 'custom'."""

    values: Mapping[tuple[int, int], float]
    unit: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))

    def value(self, school_id: int, slot: int) -> float:
        return self.values[(school_id, slot)]

    def big_m(self) -> float:
        """Smallest constant exceeding every pairwise difference of entries."""
        vals = self.values.values()
        return max(vals) - min(vals) if self.values else 0.0


def _start_slots(inst: Instance) -> range:
    return range(inst.beta + 1, inst.grid.am_slots + 1)


def abs_deviation_matrix(inst: Instance, unit: str = "minutes") -> DisutilityMatrix:
    if unit not in ("slots", "minutes"):
        raise ValueError(f"unit must be 'slots' or 'minutes', got {unit!r}")
    scale = inst.grid.slot_minutes if unit == "minutes" else 1
    values = {
        (s.id, m): float(abs(m - s.current_start) * scale)
        for s in inst.schools
        for m in _start_slots(inst)
    }
    return DisutilityMatrix(values=values, unit=unit)


def scenario4_matrix(inst: Instance) -> DisutilityMatrix:
    """Earlier-is-worse cost, in slot units.

    Moving k slots earlier costs k ** 1.25; moving k slots later costs k.
    """
    values: dict[tuple[int, int], float] = {}
    for s in inst.schools:
        mhat = s.current_start
        for m in _start_slots(inst):
            if m < mhat:
                values[(s.id, m)] = float(mhat - m) ** 1.25
            elif m == mhat:
                values[(s.id, m)] = 0.0
            else:
                values[(s.id, m)] = float(m - mhat)
    return DisutilityMatrix(values=values, unit="slots")


def custom_matrix(
    inst: Instance, values: Mapping[tuple[int, int], float]
) -> DisutilityMatrix:
    """Wrap caller-provided costs, insisting on full domain coverage."""
    for s in inst.schools:
        for m in _start_slots(inst):
            if (s.id, m) not in values:
                raise ValueError(f"missing ({s.id}, {m})")
    clean = {}
    for (n, m), val in values.items():
        val = float(val)
        if val < 0:
            raise ValueError(f"negative disutility {val} at ({n}, {m})")
        clean[(n, m)] = val
    return DisutilityMatrix(values=clean, unit="custom")


@dataclass(frozen=True)
class EquityReport:
    """Per-school disutilities plus distribution summaries.

    pi is keyed by school id; sorted_desc is the same multiset sorted worst
    first (the vector lexicographic objectives act on). Averages and the
    population standard deviation are of |start change| in minutes; histogram
    buckets |change| by its 5-minute floor (bucket key = lower edge).
    """

    pi: Mapping[int, float]
    pi_max: float
    sorted_desc: tuple[float, ...]
    total: float
    avg_abs_change_minutes: float
    std_abs_change_minutes: float
    histogram: Mapping[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pi", dict(self.pi))
        object.__setattr__(self, "histogram", dict(self.histogram))

    def to_dict(self) -> dict:
        return {
            "pi": {str(k): v for k, v in sorted(self.pi.items())},
            "pi_max": self.pi_max,
            "sorted_desc": list(self.sorted_desc),
            "total": self.total,
            "avg_abs_change_minutes": self.avg_abs_change_minutes,
            "std_abs_change_minutes": self.std_abs_change_minutes,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def evaluate(inst: Instance, sched: Schedule, c: DisutilityMatrix) -> EquityReport:
    check_schedule_shape(inst, sched)
    pi: dict[int, float] = {}
    changes_min: list[float] = []
    histogram: dict[int, int] = {}
    for s in inst.schools:
        new = sched.start[s.id]
        pi[s.id] = c.value(s.id, new)
        delta_min = abs(new - s.current_start) * inst.grid.slot_minutes
        changes_min.append(float(delta_min))
        bucket = (delta_min // 5) * 5
        histogram[bucket] = histogram.get(bucket, 0) + 1

    n = len(changes_min)
    mean = sum(changes_min) / n
    var = sum((x - mean) ** 2 for x in changes_min) / n
    pis = list(pi.values())
    return EquityReport(
        pi=pi,
        pi_max=max(pis),
        sorted_desc=tuple(sorted(pis, reverse=True)),
        total=sum(pis),
        avg_abs_change_minutes=mean,
        std_abs_change_minutes=math.sqrt(max(var, 0.0)),
        histogram=histogram,
    )


def price_of_fairness(f_fair: float, f_opt: float) -> float:
    """Relative efficiency given up for fairness: (f_fair - f_opt) / f_opt."""
    if f_opt <= 0:
        raise ValueError(f"reference objective must be positive, got {f_opt}")
    return (f_fair - f_opt) / f_opt
