"""A complete assignment of bell times and route times.

Kept separate from the engine so that equity evaluation, fleet assignment,
and model conversion can consume schedules without importing the search code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .instance import Instance

__all__ = [
    "Schedule",
    "schedule_to_dict",
    "schedule_from_dict",
    "check_schedule_shape",
]


@dataclass(frozen=True)
class Schedule:
    """start/end are keyed by school id; arrivals and departures by route id.

    end[n] = start[n] + day_length[n] always; it is stored anyway because
    reports and afternoon reasoning read it constantly. buses is the fleet
    size needed to run the schedule (max simultaneous routes over both
    half-days).
    """

    start: Mapping[int, int]
    end: Mapping[int, int]
    am_arrival: Mapping[int, int]
    pm_departure: Mapping[int, int]
    buses: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", dict(self.start))
        object.__setattr__(self, "end", dict(self.end))
        object.__setattr__(self, "am_arrival", dict(self.am_arrival))
        object.__setattr__(self, "pm_departure", dict(self.pm_departure))


def schedule_to_dict(sched: Schedule) -> dict:
    return {
        "start": {str(k): v for k, v in sorted(sched.start.items())},
        "end": {str(k): v for k, v in sorted(sched.end.items())},
        "am_arrival": {str(k): v for k, v in sorted(sched.am_arrival.items())},
        "pm_departure": {str(k): v for k, v in sorted(sched.pm_departure.items())},
        "buses": sched.buses,
    }


def schedule_from_dict(data: Mapping) -> Schedule:
    return Schedule(
        start={int(k): int(v) for k, v in data["start"].items()},
        end={int(k): int(v) for k, v in data["end"].items()},
        am_arrival={int(k): int(v) for k, v in data["am_arrival"].items()},
        pm_departure={int(k): int(v) for k, v in data["pm_departure"].items()},
        buses=int(data["buses"]),
    )


def check_schedule_shape(inst: Instance, sched: Schedule) -> None:
    """Raise ValueError unless the schedule covers exactly this instance."""
    want_schools = {s.id for s in inst.schools}
    if set(sched.start) != want_schools:
        missing = sorted(want_schools - set(sched.start))
        extra = sorted(set(sched.start) - want_schools)
        raise ValueError(
            f"schedule school coverage mismatch: missing {missing}, extra {extra}"
        )
    want_am = {r.id for r in inst.am_routes()}
    if set(sched.am_arrival) != want_am:
        raise ValueError("schedule does not cover exactly the morning routes")
    want_pm = {r.id for r in inst.pm_routes()}
    if set(sched.pm_departure) != want_pm:
        raise ValueError("schedule does not cover exactly the afternoon routes")
    for s in inst.schools:
        if sched.end[s.id] != sched.start[s.id] + s.day_length:
            raise ValueError(
                f"school {s.id}: end slot {sched.end[s.id]} is not start "
                f"{sched.start[s.id]} plus day length {s.day_length}"
            )
