"""Shared builders for randomized test instances.

random_tiny keeps the full schedule space small enough for the exhaustive
oracle; random_small targets the engine's exact range. Both construct
instances that are valid by construction and double-check with the
validator so a generator bug cannot masquerade as a solver bug.
"""

import random

import bellsched as bs
from bellsched.instance import Instance, Route, School, TimeGrid


def enumeration_size(inst: Instance) -> int:
    """Upper bound on complete schedules, mirroring the oracle's estimate."""
    g = inst.grid
    size = 1
    for s in inst.schools:
        starts = [
            m for m in s.allowed_starts
            if g.pm_min <= m + s.day_length <= g.pm_max - inst.lam
        ]
        size *= len(starts)
    size *= (inst.alpha - inst.beta + 1) ** len(inst.am_routes())
    size *= (inst.mu - inst.lam + 1) ** len(inst.pm_routes())
    return size


def _build(rng: random.Random, *, n_max: int, m_max: int, dur_max: int,
           routes_max: int, window: int, starts_max: int) -> Instance:
    m_slots = rng.randint(max(5, m_max - 2), m_max)
    beta = rng.randint(0, 1)
    alpha = beta + rng.randint(1, window)
    lam = rng.randint(0, 1)
    mu = lam + rng.randint(0, window - 1)
    n = rng.randint(1, n_max)

    pool = list(range(beta + 1, m_slots + 1))
    schools = []
    for sid in range(1, n + 1):
        k = rng.randint(2, min(starts_max, len(pool)))
        allowed = tuple(sorted(rng.sample(pool, k)))
        schools.append(
            School(
                id=sid,
                label=f"S{sid}",
                current_start=rng.choice(pool),
                day_length=rng.randint(1, 4),
                allowed_starts=allowed,
            )
        )

    deltas = [s.day_length for s in schools]
    pm_min = min(min(s.allowed_starts) + s.day_length for s in schools)
    pm_max = m_slots + lam + max(deltas) + rng.randint(0, 1)
    grid = TimeGrid(
        slot_minutes=5, am_slots=m_slots, pm_min=pm_min, pm_max=pm_max,
        clock_origin=475,
    )

    routes = []
    rid = 1
    for s in schools:
        for _ in range(rng.randint(1, routes_max)):
            routes.append(Route(id=rid, school=s.id, period="AM",
                                duration_slots=rng.randint(1, dur_max)))
            rid += 1
    for s in schools:
        for _ in range(rng.randint(1, routes_max)):
            routes.append(Route(id=rid, school=s.id, period="PM",
                                duration_slots=rng.randint(1, dur_max)))
            rid += 1

    return Instance(
        grid=grid, alpha=alpha, beta=beta, lam=lam, mu=mu,
        schools=tuple(schools), routes=tuple(routes),
    )


def random_tiny(rng: random.Random, max_leaves: int = 50_000) -> Instance:
    """Oracle-sized instance: N <= 3, M <= 8, <= 2 routes per school and
    period, durations <= 3. Resamples until the full enumeration fits."""
    while True:
        inst = _build(rng, n_max=3, m_max=8, dur_max=3, routes_max=2,
                      window=2, starts_max=4)
        if enumeration_size(inst) > max_leaves:
            continue
        problems = bs.validate_instance(inst)
        assert not problems, problems
        domains, blocked = bs.start_domains(inst)
        if domains is None:
            continue
        return inst


def random_small(rng: random.Random, max_leaves: int = 5_000_000) -> Instance:
    """Engine-sized instance: N <= 6, M <= 12; too big for the oracle but
    small enough that branch and bound proves optimality quickly."""
    while True:
        inst = _build(rng, n_max=6, m_max=12, dur_max=5, routes_max=2,
                      window=3, starts_max=5)
        if enumeration_size(inst) > max_leaves:
            continue
        problems = bs.validate_instance(inst)
        assert not problems, problems
        domains, blocked = bs.start_domains(inst)
        if domains is None:
            continue
        return inst


def random_schedule(inst: Instance, rng: random.Random):
    """A uniformly drawn feasible schedule (starts, arrivals, departures)."""
    g = inst.grid
    start = {}
    end = {}
    for s in inst.schools:
        cand = [
            m for m in s.allowed_starts
            if g.pm_min <= m + s.day_length <= g.pm_max - inst.lam
        ]
        m = rng.choice(cand)
        start[s.id] = m
        end[s.id] = m + s.day_length
    am_arrival = {}
    for r in inst.am_routes():
        m = start[r.school]
        am_arrival[r.id] = rng.randint(max(m - inst.alpha, 1), m - inst.beta)
    pm_departure = {}
    for r in inst.pm_routes():
        e = end[r.school]
        pm_departure[r.id] = rng.randint(e + inst.lam, min(e + inst.mu, g.pm_max))
    sched = bs.Schedule(
        start=start, end=end, am_arrival=am_arrival,
        pm_departure=pm_departure, buses=0,
    )
    return bs.Schedule(
        start=start, end=end, am_arrival=am_arrival,
        pm_departure=pm_departure, buses=bs.min_buses(inst, sched),
    )
