"""Bus counting and concrete bus assignment for a fixed schedule.

A morning route with duration r arriving at slot t occupies a bus over slots
t-r+1..t; an afternoon route departing at t occupies t..t+r-1. Occupancy
profiles count routes per slot with intervals clipped to the visible grid
(morning 1..am_slots, afternoon pm_min..pm_max). Clipping loses no peak: an
interval poking past the edge always covers the edge slot itself, so the
clipped and unclipped maxima agree.

The minimum fleet equals the peak number of routes in operation at once, and
the greedy sweep in assign_buses achieves it: operating intervals form an
interval graph, where first-fit coloring in interval-start order is optimal.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .instance import Instance
from .schedule import Schedule, check_schedule_shape

__all__ = [
    "OccupancyProfile",
    "BusAssignment",
    "occupancy",
    "min_buses",
    "assign_buses",
]

CSV_HEADER = "route_id,school_id,period,start_slot,end_slot,bus_id"


@dataclass(frozen=True)
class OccupancyProfile:
    """Routes in operation per slot. am[t-1] is slot t; pm[t-pm_min] is slot t."""

    am: tuple[int, ...]
    pm: tuple[int, ...]
    am_peak: int
    pm_peak: int

    @property
    def peak(self) -> int:
        return max(self.am_peak, self.pm_peak)


@dataclass(frozen=True)
class BusAssignment:
    """rows: (route_id, school_id, period, start_slot, end_slot, bus_id)."""

    rows: tuple[tuple[int, int, str, int, int, int], ...]
    fleet_size: int

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for row in sorted(self.rows):
            out.write(",".join(str(v) for v in row) + "\n")
        return out.getvalue()


def _operating_intervals(
    inst: Instance, sched: Schedule, period: str
) -> list[tuple[int, int, int, int]]:
    """(start_slot, end_slot, route_id, school_id), unclipped."""
    out = []
    if period == "AM":
        for r in inst.am_routes():
            a = sched.am_arrival[r.id]
            out.append((a - r.duration_slots + 1, a, r.id, r.school))
    else:
        for r in inst.pm_routes():
            d = sched.pm_departure[r.id]
            out.append((d, d + r.duration_slots - 1, r.id, r.school))
    return out


def occupancy(inst: Instance, sched: Schedule) -> OccupancyProfile:
    check_schedule_shape(inst, sched)
    g = inst.grid
    am = [0] * g.am_slots
    for lo, hi, _, _ in _operating_intervals(inst, sched, "AM"):
        for t in range(max(lo, 1), min(hi, g.am_slots) + 1):
            am[t - 1] += 1
    pm = [0] * (g.pm_max - g.pm_min + 1)
    for lo, hi, _, _ in _operating_intervals(inst, sched, "PM"):
        for t in range(max(lo, g.pm_min), min(hi, g.pm_max) + 1):
            pm[t - g.pm_min] += 1
    return OccupancyProfile(
        am=tuple(am),
        pm=tuple(pm),
        am_peak=max(am) if am else 0,
        pm_peak=max(pm) if pm else 0,
    )


def min_buses(inst: Instance, sched: Schedule) -> int:
    """Fewest buses that can run the schedule: peak simultaneous routes."""
    return occupancy(inst, sched).peak


def assign_buses(inst: Instance, sched: Schedule) -> BusAssignment:
    """Concrete route-to-bus mapping using min_buses(inst, sched) buses.

    Each half-day is swept in interval order (start slot, longer first, then
    route id) and every route takes the lowest-numbered bus free at its start.
    Buses are shared between the half-days by number; the fleet size is the
    larger of the two sweeps.
    """
    check_schedule_shape(inst, sched)
    rows: list[tuple[int, int, str, int, int, int]] = []
    fleet = 0
    for period in ("AM", "PM"):
        intervals = _operating_intervals(inst, sched, period)
        intervals.sort(key=lambda iv: (iv[0], -(iv[1] - iv[0]), iv[2]))
        last_end: list[int] = []  # per bus, last occupied slot this half-day
        for lo, hi, rid, school in intervals:
            bus = None
            for b, end in enumerate(last_end):
                if end < lo:
                    bus = b
                    break
            if bus is None:
                bus = len(last_end)
                last_end.append(hi)
            else:
                last_end[bus] = hi
            rows.append((rid, school, period, lo, hi, bus + 1))
        fleet = max(fleet, len(last_end))
    return BusAssignment(rows=tuple(rows), fleet_size=fleet)
