"""Problem instances: the time grid, schools, bus routes, and their generator.

Time is a single axis of equal slots. Slot 1 starts at ``clock_origin``
minutes after midnight and every slot lasts ``slot_minutes`` minutes. Morning
start slots run 1..am_slots; afternoon slots continue on the same axis and the
afternoon window of interest is pm_min..pm_max. A school starting at slot m
dismisses at slot m + day_length.

A morning route serving a school that starts at slot m must arrive in
[m - alpha, m - beta]; an afternoon route must depart in
[end + lambda, end + mu] where end is the dismissal slot. A route with
duration r slots arriving at slot t occupies a bus for slots t-r+1..t; one
departing at t occupies t..t+r-1.

Public API
----------
TimeGrid, School, Route, Instance
    Frozen value objects; ``Instance`` is the unit of work everything else
    consumes.
validate_instance(inst) -> list[str]
    Structural invariant check. Violations are data, not exceptions.
GeneratorSpec, generate_instance(spec, seed)
    Deterministic random instance families used throughout the tests and the
    command line. Same spec + same seed = identical instance, bit for bit.
save_instance(inst, path), load_instance(path)
    JSON round trip. Loading is strict: unknown fields are errors.
slot_clock(grid, slot) -> str
    Wall-clock rendering of a slot index, e.g. "8:45 AM".

The randomness contract: draws come from ``numpy.random.Generator`` seeded
with ``numpy.random.PCG64(seed)`` in a fixed documented order (day lengths,
then extra-route owners, then AM durations school by school, then PM
durations school by school). PCG64 is stable across platforms and numpy
releases, so generated corpora are reproducible.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

__all__ = [
    "TimeGrid",
    "School",
    "Route",
    "Instance",
    "GeneratorSpec",
    "validate_instance",
    "generate_instance",
    "save_instance",
    "load_instance",
    "slot_clock",
]

SCHEMA_VERSION = 1

# Scenario defaults shared by the generator and the CLI. All four named
# scenarios live on the same 5-minute grid with slot 1 = 7:55 AM and morning
# starts allowed 8:15-9:20 (slots 5..18).
_SLOT_MINUTES = 5
_AM_SLOTS = 18
_CLOCK_ORIGIN = 475  # 7:55 AM in minutes since midnight
_ALLOWED_START_SLOTS = tuple(range(5, 19))
_ALPHA, _BETA = 4, 2
_LAMBDA, _MU = 1, 4
_DAY_LENGTH_MINUTES = (390, 405, 450)
_ROUTE_RAW_MINUTES = (10, 50)  # inclusive bounds, before the fixed transition
_ROUTE_TRANSITION_MINUTES = 15
_SCENARIO_SCHOOLS = {"I": 15, "II": 15, "III": 15, "IV": 30}
_SCENARIO_AM_ROUTES = {"I": 59, "II": 59, "III": 59, "IV": 100}


@dataclass(frozen=True)
class TimeGrid:
    """Slot geometry. pm_min..pm_max must cover every reachable dismissal."""

    slot_minutes: int
    am_slots: int
    pm_min: int
    pm_max: int
    clock_origin: int


@dataclass(frozen=True)
class School:
    id: int
    label: str
    current_start: int
    day_length: int  # slots between start and dismissal
    allowed_starts: tuple[int, ...]

    def __post_init__(self) -> None:
        normalized = tuple(sorted(set(int(m) for m in self.allowed_starts)))
        object.__setattr__(self, "allowed_starts", normalized)


@dataclass(frozen=True)
class Route:
    id: int
    school: int
    period: str  # "AM" or "PM"
    duration_slots: int


@dataclass(frozen=True)
class Instance:
    grid: TimeGrid
    alpha: int
    beta: int
    lam: int  # serialized as "lambda"
    mu: int
    schools: tuple[School, ...]
    routes: tuple[Route, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "schools", tuple(self.schools))
        object.__setattr__(self, "routes", tuple(self.routes))

    def school_by_id(self, school_id: int) -> School:
        for s in self.schools:
            if s.id == school_id:
                return s
        raise KeyError(f"no school with id {school_id}")

    def am_routes(self, school_id: Optional[int] = None) -> tuple[Route, ...]:
        return tuple(
            r
            for r in self.routes
            if r.period == "AM" and (school_id is None or r.school == school_id)
        )

    def pm_routes(self, school_id: Optional[int] = None) -> tuple[Route, ...]:
        return tuple(
            r
            for r in self.routes
            if r.period == "PM" and (school_id is None or r.school == school_id)
        )

    def restrict_starts(self, domains: Mapping[int, Iterable[int]]) -> "Instance":
        """Copy with each listed school's allowed_starts intersected away.

        Used for fairness-window solves and their exported models; schools not
        listed keep their full domain.
        """
        schools = []
        for s in self.schools:
            if s.id in domains:
                keep = tuple(sorted(set(domains[s.id]) & set(s.allowed_starts)))
                schools.append(
                    School(s.id, s.label, s.current_start, s.day_length, keep)
                )
            else:
                schools.append(s)
        return Instance(
            self.grid, self.alpha, self.beta, self.lam, self.mu,
            tuple(schools), self.routes,
        )


def validate_instance(inst: Instance) -> list[str]:
    """Check structural invariants; return human-readable violations.

    An empty list means the instance is well formed. Feasibility of the
    scheduling problem itself is NOT checked here; the engine reports that.
    """
    v: list[str] = []
    g = inst.grid
    if g.slot_minutes <= 0:
        v.append(f"slot_minutes must be positive, got {g.slot_minutes}")
    if g.am_slots < 1:
        v.append(f"am_slots must be at least 1, got {g.am_slots}")
    if g.pm_min > g.pm_max:
        v.append(f"pm window is empty: pm_min {g.pm_min} > pm_max {g.pm_max}")
    if not (inst.alpha >= inst.beta >= 0):
        v.append(f"need alpha >= beta >= 0, got alpha={inst.alpha} beta={inst.beta}")
    if not (inst.mu >= inst.lam >= 0):
        v.append(f"need mu >= lambda >= 0, got mu={inst.mu} lambda={inst.lam}")
    if not inst.schools:
        v.append("instance has no schools")

    for pos, s in enumerate(inst.schools, start=1):
        if s.id != pos:
            v.append(f"school ids must be 1..N in order; position {pos} has id {s.id}")
        if s.day_length < 1:
            v.append(f"school {s.id}: day_length must be at least 1, got {s.day_length}")
        lo = inst.beta + 1
        if not (lo <= s.current_start <= g.am_slots):
            v.append(
                f"school {s.id}: current_start {s.current_start} outside "
                f"[{lo}, {g.am_slots}]"
            )
        if not s.allowed_starts:
            v.append(f"school {s.id}: allowed_starts is empty")
        for m in s.allowed_starts:
            if not (lo <= m <= g.am_slots):
                v.append(
                    f"school {s.id}: allowed start {m} outside [{lo}, {g.am_slots}]"
                )
                break

    school_ids = {s.id for s in inst.schools}
    seen_route_ids: set[int] = set()
    for r in inst.routes:
        if r.id in seen_route_ids:
            v.append(f"duplicate route id {r.id}")
        seen_route_ids.add(r.id)
        if r.school not in school_ids:
            v.append(f"route {r.id}: unknown school {r.school}")
        if r.period not in ("AM", "PM"):
            v.append(f"route {r.id}: period must be 'AM' or 'PM', got {r.period!r}")
        if r.duration_slots < 1:
            v.append(f"route {r.id}: duration_slots must be at least 1, got {r.duration_slots}")

    if inst.schools and not any(msg.startswith("school") for msg in v):
        deltas = [s.day_length for s in inst.schools]
        if g.pm_min > g.am_slots + min(deltas):
            v.append(
                f"pm_min {g.pm_min} exceeds the earliest reachable dismissal "
                f"{g.am_slots + min(deltas)}"
            )
        need = g.am_slots + inst.lam + max(deltas)
        if g.pm_max < need:
            v.append(
                f"pm_max {g.pm_max} is below the latest dismissal plus lambda "
                f"({need}); afternoon departures would be cut off"
            )
        if g.pm_max < g.pm_min + inst.lam:
            v.append(
                f"pm window shorter than lambda: pm_max {g.pm_max} < "
                f"pm_min {g.pm_min} + lambda {inst.lam}"
            )
    return v


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate. scenario picks the current-start pattern:

    I and IV: every school currently starts 8:45 (slot 11).
    II: every school currently starts 9:20 (slot 18).
    III: thirds at 8:15 / 8:45 / 9:20 (slots 5 / 11 / 18).

    schools / am_routes override the scenario's population size; the number
    of afternoon routes always equals the number of morning routes.
    """

    scenario: str = "I"
    schools: Optional[int] = None
    am_routes: Optional[int] = None


def _current_start_pattern(scenario: str, n_schools: int) -> list[int]:
    if scenario in ("I", "IV"):
        return [11] * n_schools
    if scenario == "II":
        return [18] * n_schools
    if scenario == "III":
        pattern = (5, 11, 18)
        return [pattern[(3 * i) // n_schools] for i in range(n_schools)]
    raise ValueError(f"unknown scenario {scenario!r}")


def _route_duration_slots(raw_minutes: int) -> int:
    total = raw_minutes + _ROUTE_TRANSITION_MINUTES
    return math.ceil(total / _SLOT_MINUTES)


def generate_instance(spec: GeneratorSpec, seed: int) -> Instance:
    """Draw a random instance for the given scenario family.

    Fixed draw order (documented so corpora stay reproducible):
      1. one day-length pick per school, in school order;
      2. one owner pick per extra route beyond the guaranteed one per school;
      3. morning route raw durations, school by school;
      4. afternoon route raw durations, school by school.
    """
    if spec.scenario not in _SCENARIO_SCHOOLS:
        raise ValueError(f"unknown scenario {spec.scenario!r}")
    n = spec.schools if spec.schools is not None else _SCENARIO_SCHOOLS[spec.scenario]
    r_am = spec.am_routes if spec.am_routes is not None else _SCENARIO_AM_ROUTES[spec.scenario]
    if n < 1:
        raise ValueError(f"need at least one school, got {n}")
    if r_am < n:
        raise ValueError(
            f"need at least one morning route per school: {r_am} routes for {n} schools"
        )

    rng = np.random.Generator(np.random.PCG64(seed))

    day_slots = []
    for _ in range(n):
        minutes = _DAY_LENGTH_MINUTES[int(rng.integers(0, len(_DAY_LENGTH_MINUTES)))]
        day_slots.append(minutes // _SLOT_MINUTES)

    counts = [1] * n
    for _ in range(r_am - n):
        counts[int(rng.integers(0, n))] += 1

    lo, hi = _ROUTE_RAW_MINUTES
    am_durations = [
        [_route_duration_slots(int(rng.integers(lo, hi + 1))) for _ in range(counts[i])]
        for i in range(n)
    ]
    pm_durations = [
        [_route_duration_slots(int(rng.integers(lo, hi + 1))) for _ in range(counts[i])]
        for i in range(n)
    ]

    currents = _current_start_pattern(spec.scenario, n)
    schools = tuple(
        School(
            id=i + 1,
            label=f"School {i + 1}",
            current_start=currents[i],
            day_length=day_slots[i],
            allowed_starts=_ALLOWED_START_SLOTS,
        )
        for i in range(n)
    )

    pm_min = min(_ALLOWED_START_SLOTS) + min(day_slots)
    pm_max = _AM_SLOTS + _LAMBDA + max(day_slots)
    grid = TimeGrid(
        slot_minutes=_SLOT_MINUTES,
        am_slots=_AM_SLOTS,
        pm_min=pm_min,
        pm_max=pm_max,
        clock_origin=_CLOCK_ORIGIN,
    )

    routes = []
    rid = 1
    for i in range(n):
        for dur in am_durations[i]:
            routes.append(Route(id=rid, school=i + 1, period="AM", duration_slots=dur))
            rid += 1
    for i in range(n):
        for dur in pm_durations[i]:
            routes.append(Route(id=rid, school=i + 1, period="PM", duration_slots=dur))
            rid += 1

    inst = Instance(
        grid=grid,
        alpha=_ALPHA,
        beta=_BETA,
        lam=_LAMBDA,
        mu=_MU,
        schools=schools,
        routes=tuple(routes),
    )
    violations = validate_instance(inst)
    if violations:  # generator bug, not user error
        raise RuntimeError("generated an invalid instance: " + "; ".join(violations))
    return inst


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def _instance_to_dict(inst: Instance) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "grid": {
            "slot_minutes": inst.grid.slot_minutes,
            "am_slots": inst.grid.am_slots,
            "pm_min": inst.grid.pm_min,
            "pm_max": inst.grid.pm_max,
            "clock_origin": inst.grid.clock_origin,
        },
        "alpha": inst.alpha,
        "beta": inst.beta,
        "lambda": inst.lam,
        "mu": inst.mu,
        "schools": [
            {
                "id": s.id,
                "label": s.label,
                "current_start": s.current_start,
                "day_length": s.day_length,
                "allowed_starts": list(s.allowed_starts),
            }
            for s in inst.schools
        ],
        "routes": [
            {
                "id": r.id,
                "school": r.school,
                "period": r.period,
                "duration_slots": r.duration_slots,
            }
            for r in inst.routes
        ],
    }


def save_instance(inst: Instance, path: str) -> None:
    """Write the instance as JSON, atomically, with sorted keys.

    Byte-identical output for equal instances is part of the contract; the
    test corpus and golden files rely on it.
    """
    payload = json.dumps(_instance_to_dict(inst), indent=2, sort_keys=True) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require_keys(obj: dict, allowed: dict, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ValueError(f"unknown field {key!r} in {where}")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ValueError(f"missing field {key!r} in {where}")


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where} must be an integer, got {value!r}")
    return value


def load_instance(path: str, *, check: bool = True) -> Instance:
    """Parse and validate an instance file; raise ValueError on any defect.

    check=False skips the semantic validation pass (parse errors still
    raise), for callers that want to report violations themselves."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("instance file must hold a JSON object")
    _require_keys(
        data,
        {
            "version": True, "grid": True, "alpha": True, "beta": True,
            "lambda": True, "mu": True, "schools": True, "routes": True,
        },
        "instance",
    )
    if data["version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported version {data['version']!r}")

    gd = data["grid"]
    _require_keys(
        gd,
        {
            "slot_minutes": True, "am_slots": True, "pm_min": True,
            "pm_max": True, "clock_origin": True,
        },
        "grid",
    )
    grid = TimeGrid(
        slot_minutes=_as_int(gd["slot_minutes"], "grid.slot_minutes"),
        am_slots=_as_int(gd["am_slots"], "grid.am_slots"),
        pm_min=_as_int(gd["pm_min"], "grid.pm_min"),
        pm_max=_as_int(gd["pm_max"], "grid.pm_max"),
        clock_origin=_as_int(gd["clock_origin"], "grid.clock_origin"),
    )

    schools = []
    for idx, sd in enumerate(data["schools"]):
        where = f"schools[{idx}]"
        _require_keys(
            sd,
            {
                "id": True, "label": True, "current_start": True,
                "day_length": True, "allowed_starts": True,
            },
            where,
        )
        if not isinstance(sd["label"], str):
            raise ValueError(f"{where}.label must be a string")
        if not isinstance(sd["allowed_starts"], list):
            raise ValueError(f"{where}.allowed_starts must be a list")
        schools.append(
            School(
                id=_as_int(sd["id"], f"{where}.id"),
                label=sd["label"],
                current_start=_as_int(sd["current_start"], f"{where}.current_start"),
                day_length=_as_int(sd["day_length"], f"{where}.day_length"),
                allowed_starts=tuple(
                    _as_int(m, f"{where}.allowed_starts") for m in sd["allowed_starts"]
                ),
            )
        )

    routes = []
    for idx, rd in enumerate(data["routes"]):
        where = f"routes[{idx}]"
        _require_keys(
            rd,
            {"id": True, "school": True, "period": True, "duration_slots": True},
            where,
        )
        if not isinstance(rd["period"], str):
            raise ValueError(f"{where}.period must be a string")
        routes.append(
            Route(
                id=_as_int(rd["id"], f"{where}.id"),
                school=_as_int(rd["school"], f"{where}.school"),
                period=rd["period"],
                duration_slots=_as_int(rd["duration_slots"], f"{where}.duration_slots"),
            )
        )

    inst = Instance(
        grid=grid,
        alpha=_as_int(data["alpha"], "alpha"),
        beta=_as_int(data["beta"], "beta"),
        lam=_as_int(data["lambda"], "lambda"),
        mu=_as_int(data["mu"], "mu"),
        schools=tuple(schools),
        routes=tuple(routes),
    )
    if check:
        violations = validate_instance(inst)
        if violations:
            raise ValueError("invalid instance: " + "; ".join(violations))
    return inst


def slot_clock(grid: TimeGrid, slot: int) -> str:
    """Render a slot index on the wall clock, e.g. slot 11 -> '8:45 AM'."""
    minutes = grid.clock_origin + (slot - 1) * grid.slot_minutes
    h24 = (minutes // 60) % 24
    mm = minutes % 60
    suffix = "AM" if h24 < 12 else "PM"
    h12 = h24 % 12
    if h12 == 0:
        h12 = 12
    return f"{h12}:{mm:02d} {suffix}"
