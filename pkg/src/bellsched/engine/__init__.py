"""Exact scheduling engine.

Solves the joint bell-time / route-time problem directly on schedules (no
external solver): depth-first branch and bound over school starts and route
placements, with a greedy initial incumbent, combinatorial lower bounds, and
threshold searches on top of a shared feasibility kernel.

Public surface:

solve_base(inst, ...)                 fewest buses, optional distinct-start cap
solve_fair_tau(inst, tau_minutes)     fewest buses with |start change| <= tau
feasible_with(inst, z_bar, ...)       any schedule under a bus cap + counting caps
solve_minimax(inst, c, z_bar)         minimize the worst school disutility
solve_minimax_weighted(inst, c, phi)  trade buses against worst disutility
solve_lexmin(inst, c, z_bar)          lexicographic minimax, worst rank first
solve_minsum(inst, c, z_bar)          minimize total disutility
brute_force_oracle(...)               exhaustive reference for tiny instances
tiny_example()                        two-school worked instance used in docs

The hot kernel lives in ``_search`` (optionally compiled as ``_search_c``;
KERNEL_TAG says which one loaded). Ties are broken deterministically: schools
branch in descending total route duration (then id), start slots ascend, and
equal-duration routes of one school take nondecreasing arrival slots, so
equal calls return identical schedules on every platform.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from ..equity import DisutilityMatrix, EquityReport, evaluate
from ..fleet import min_buses, occupancy
from ..instance import Instance, School, validate_instance
from ..schedule import Schedule
from .oracle import OracleResult, SearchSpaceError, brute_force_oracle, enumerate_all

try:  # compiled twin, built by setup.py when Cython is available
    from . import _search_c as _kernel  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    from . import _search as _kernel

KERNEL_TAG = _kernel.kernel_tag()
KERNEL_MODULE = _kernel.__name__

_int_array = _kernel.int_array
_double_array = _kernel.double_array

INFEASIBLE_PEAK = _kernel.INFEASIBLE_PEAK

_TOL = 1e-9

__all__ = [
    "KERNEL_TAG",
    "KERNEL_MODULE",
    "SolveReport",
    "SearchSpaceError",
    "OracleResult",
    "brute_force_oracle",
    "enumerate_all",
    "solve_base",
    "solve_fair_tau",
    "feasible_with",
    "solve_minimax",
    "solve_minimax_weighted",
    "solve_lexmin",
    "solve_minsum",
    "start_domains",
    "lower_bound",
    "tiny_example",
]


@dataclass
class SolveReport:
    """Outcome of one engine call.

    status: 'optimal' (proved), 'feasible' (incumbent, proof incomplete),
    'infeasible' (proved empty), or 'unknown' (timed out with nothing).
    objective_value is an int or float for scalar objectives and a tuple for
    the lexicographic one. lower_bound is filled by the bus-minimizing
    solves. equity is attached whenever a disutility matrix was in play.
    """

    status: str
    objective_kind: str
    objective_value: object = None
    schedule: Optional[Schedule] = None
    optimal: bool = False
    nodes: int = 0
    elapsed: float = 0.0
    z_bar: Optional[int] = None
    lower_bound: Optional[int] = None
    equity: Optional[EquityReport] = None
    infeasible_school: Optional[int] = None
    message: Optional[str] = None
    extra: dict = field(default_factory=dict)


def tiny_example() -> Instance:
    """Two schools, one short morning route each, six morning slots.

    Small enough to reason about by hand: one bus suffices exactly when the
    two bell times sit at least two slots apart.
    """
    from ..instance import Route, TimeGrid

    grid = TimeGrid(slot_minutes=5, am_slots=6, pm_min=3, pm_max=7, clock_origin=475)
    schools = (
        School(id=1, label="North", current_start=4, day_length=1,
               allowed_starts=tuple(range(2, 7))),
        School(id=2, label="South", current_start=4, day_length=1,
               allowed_starts=tuple(range(2, 7))),
    )
    routes = (
        Route(id=1, school=1, period="AM", duration_slots=2),
        Route(id=2, school=2, period="AM", duration_slots=2),
    )
    return Instance(grid=grid, alpha=2, beta=1, lam=0, mu=0,
                    schools=schools, routes=routes)


# ---------------------------------------------------------------------------
# Domains, bounds, marshaling
# ---------------------------------------------------------------------------

def start_domains(
    inst: Instance,
    *,
    tau_minutes: Optional[float] = None,
    threshold: Optional[float] = None,
    c: Optional[DisutilityMatrix] = None,
    restrict: Optional[Mapping[int, Iterable[int]]] = None,
) -> tuple[Optional[dict[int, tuple[int, ...]]], Optional[int]]:
    """Candidate start slots per school id, or (None, blocking school id).

    Every filter is an intersection: allowed starts, representable dismissal
    (pm_min <= start + day_length <= pm_max - lambda), optional fairness
    window around the current start, optional disutility threshold, optional
    explicit restriction.
    """
    g = inst.grid
    out: dict[int, tuple[int, ...]] = {}
    for s in inst.schools:
        cand = [
            m
            for m in s.allowed_starts
            if g.pm_min <= m + s.day_length <= g.pm_max - inst.lam
        ]
        if tau_minutes is not None:
            cand = [
                m
                for m in cand
                if abs(m - s.current_start) * g.slot_minutes <= tau_minutes + _TOL
            ]
        if threshold is not None and c is not None:
            cand = [m for m in cand if c.value(s.id, m) <= threshold + _TOL]
        if restrict is not None and s.id in restrict:
            keep = set(restrict[s.id])
            cand = [m for m in cand if m in keep]
        if not cand:
            return None, s.id
        out[s.id] = tuple(cand)
    return out, None


def _validated(inst: Instance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))


class _Problem:
    """Flattened arrays for the kernel, plus the id mappings to undo them."""

    def __init__(self, inst: Instance, domains: Mapping[int, Sequence[int]]):
        self.inst = inst
        g = inst.grid
        schools = inst.schools
        n = len(schools)
        self.school_ids = [s.id for s in schools]
        self.delta = _int_array([s.day_length for s in schools])

        self.am_ids: list[int] = []
        self.pm_ids: list[int] = []
        am_dur: list[int] = []
        pm_dur: list[int] = []
        am_off = [0]
        pm_off = [0]
        totals = []
        for s in schools:
            am = sorted(inst.am_routes(s.id), key=lambda r: (-r.duration_slots, r.id))
            pm = sorted(inst.pm_routes(s.id), key=lambda r: (-r.duration_slots, r.id))
            for r in am:
                am_dur.append(r.duration_slots)
                self.am_ids.append(r.id)
            for r in pm:
                pm_dur.append(r.duration_slots)
                self.pm_ids.append(r.id)
            am_off.append(len(am_dur))
            pm_off.append(len(pm_dur))
            totals.append(sum(r.duration_slots for r in am) + sum(r.duration_slots for r in pm))

        self.order = _int_array(
            sorted(range(n), key=lambda i: (-totals[i], self.school_ids[i]))
        )
        self.am_dur = _int_array(am_dur if am_dur else [0])
        self.pm_dur = _int_array(pm_dur if pm_dur else [0])
        self.am_off = _int_array(am_off)
        self.pm_off = _int_array(pm_off)
        self.n_am = len(am_dur)
        self.n_pm = len(pm_dur)
        self.n_schools = n
        self.grid = g
        self.domains = {sid: tuple(domains[sid]) for sid in self.school_ids}
        self._set_domain_arrays()

    def _set_domain_arrays(self) -> None:
        flat: list[int] = []
        off = [0]
        for sid in self.school_ids:
            flat.extend(self.domains[sid])
            off.append(len(flat))
        self.dom_flat = _int_array(flat if flat else [0])
        self.dom_off = _int_array(off)

    def order_by_value(self, c: DisutilityMatrix) -> None:
        """Re-sort each domain by (disutility, slot); used by the sum mode."""
        self.domains = {
            sid: tuple(sorted(self.domains[sid], key=lambda m: (c.value(sid, m), m)))
            for sid in self.school_ids
        }
        self._set_domain_arrays()
        self._forced = None

    def disut_array(self, c: Optional[DisutilityMatrix]):
        stride = self.grid.am_slots + 1
        vals = [0.0] * (self.n_schools * stride)
        if c is not None:
            for i, sid in enumerate(self.school_ids):
                for m in range(self.inst.beta + 1, self.grid.am_slots + 1):
                    vals[i * stride + m] = c.value(sid, m)
        return _double_array(vals)

    def forced_arrays(self):
        """Suffix forced coverage for the kernel's subtree prune.

        Entry [pos * stride + t] counts routes of schools order[pos:] that
        cover slot t under EVERY feasible start and placement (a window
        narrower than the route leaves an unavoidable core). Any partial
        occupancy plus this count lower-bounds every completion's peak.
        """
        if getattr(self, "_forced", None) is not None:
            return self._forced
        inst = self.inst
        g = self.grid
        n = self.n_schools
        am_stride = g.am_slots + 1
        pm_w = g.pm_max - g.pm_min + 1
        am = [0] * ((n + 1) * am_stride)
        pm = [0] * ((n + 1) * pm_w)
        for pos in range(n - 1, -1, -1):
            base_a = pos * am_stride
            base_p = pos * pm_w
            for t in range(am_stride):
                am[base_a + t] = am[base_a + am_stride + t]
            for t in range(pm_w):
                pm[base_p + t] = pm[base_p + pm_w + t]
            si = self.order[pos]
            school = inst.schools[si]
            dom = self.domains[self.school_ids[si]]
            lo_a = max(min(dom) - inst.alpha, 1)
            hi_a = max(dom) - inst.beta
            for idx in range(self.am_off[si], self.am_off[si + 1]):
                r = self.am_dur[idx]
                for t in range(max(hi_a - r + 1, 1), min(lo_a, g.am_slots) + 1):
                    am[base_a + t] += 1
            lo_d = min(dom) + school.day_length + inst.lam
            hi_d = min(max(dom) + school.day_length + inst.mu, g.pm_max)
            for idx in range(self.pm_off[si], self.pm_off[si + 1]):
                r = self.pm_dur[idx]
                for t in range(hi_d, min(lo_d + r - 1, g.pm_max) + 1):
                    pm[base_p + t - g.pm_min] += 1
        self._forced = (_int_array(am), _int_array(pm))
        return self._forced

    def schedule_from(self, starts: Sequence[int], am: Sequence[int], pm: Sequence[int]) -> Schedule:
        start = {sid: starts[i] for i, sid in enumerate(self.school_ids)}
        end = {
            sid: start[sid] + s.day_length
            for sid, s in zip(self.school_ids, self.inst.schools)
        }
        am_arrival = {self.am_ids[i]: am[i] for i in range(self.n_am)}
        pm_departure = {self.pm_ids[i]: pm[i] for i in range(self.n_pm)}
        sched = Schedule(
            start=start, end=end, am_arrival=am_arrival,
            pm_departure=pm_departure, buses=0,
        )
        return Schedule(
            start=start, end=end, am_arrival=am_arrival,
            pm_departure=pm_departure, buses=min_buses(self.inst, sched),
        )


def lower_bound(inst: Instance, domains: Mapping[int, Sequence[int]]) -> int:
    """Valid lower bound on the peak: interval area plus forced occupancy.

    Area: total route-slots divided by the widest stretch one route can
    occupy. Forced occupancy: a route whose placement window is narrower
    than its duration covers some slots under EVERY placement; the max over
    slots of the forced count is unbeatable.
    """
    g = inst.grid
    am_routes = inst.am_routes()
    pm_routes = inst.pm_routes()
    bound = 0
    if am_routes:
        area = sum(r.duration_slots for r in am_routes)
        span = g.am_slots + max(r.duration_slots for r in am_routes) - 1
        bound = max(bound, math.ceil(area / span))
    if pm_routes:
        area = sum(r.duration_slots for r in pm_routes)
        span = (g.pm_max - g.pm_min - inst.lam) + max(r.duration_slots for r in pm_routes)
        bound = max(bound, math.ceil(area / span))

    forced_am = [0] * (g.am_slots + 2)
    forced_pm = [0] * (g.pm_max - g.pm_min + 2)
    by_id = {s.id: s for s in inst.schools}
    for r in am_routes:
        dom = domains[r.school]
        lo_a = max(min(dom) - inst.alpha, 1)
        hi_a = max(dom) - inst.beta
        lo_f = hi_a - r.duration_slots + 1
        for t in range(max(lo_f, 1), min(lo_a, g.am_slots) + 1):
            forced_am[t] += 1
    for r in pm_routes:
        dom = domains[r.school]
        dl = by_id[r.school].day_length
        lo_d = min(dom) + dl + inst.lam
        hi_d = min(max(dom) + dl + inst.mu, g.pm_max)
        hi_f = lo_d + r.duration_slots - 1
        for t in range(hi_d, min(hi_f, g.pm_max) + 1):
            forced_pm[t - g.pm_min] += 1
    bound = max(bound, max(forced_am), max(forced_pm))
    return bound


def _greedy_schedule(
    problem: _Problem, distinct_cap: Optional[int]
) -> Optional[tuple[list[int], list[int], list[int], int]]:
    """Spread-out incumbent: place schools in branch order, each at the start
    (and route slots) that keeps the running peak lowest. Returns flat
    (starts, am, pm, peak) in kernel layout, or None if the distinct-start
    cap wedges it."""
    inst = problem.inst
    g = problem.grid
    am_occ = [0] * (g.am_slots + 1)
    pm_occ = [0] * (g.pm_max - g.pm_min + 1)
    starts = [0] * problem.n_schools
    am_slots_chosen = [0] * problem.n_am
    pm_slots_chosen = [0] * problem.n_pm
    used_starts: set[int] = set()
    peak = 0

    def am_window(m: int) -> range:
        lo = max(m - inst.alpha, 1)
        return range(lo, m - inst.beta + 1)

    def place_routes(si: int, m: int, commit: bool) -> int:
        # Greedy per-route placement; returns the peak after this school.
        local_am: list[tuple[int, int]] = []  # (flat idx, arrival)
        local_pm: list[tuple[int, int]] = []
        cur = peak

        def add_am(a: int, r: int) -> int:
            mx = 0
            for t in range(max(a - r + 1, 1), a + 1):
                am_occ[t] += 1
                mx = max(mx, am_occ[t])
            return mx

        def del_am(a: int, r: int) -> None:
            for t in range(max(a - r + 1, 1), a + 1):
                am_occ[t] -= 1

        def add_pm(d: int, r: int) -> int:
            mx = 0
            for t in range(d, min(d + r - 1, g.pm_max) + 1):
                pm_occ[t - g.pm_min] += 1
                mx = max(mx, pm_occ[t - g.pm_min])
            return mx

        def del_pm(d: int, r: int) -> None:
            for t in range(d, min(d + r - 1, g.pm_max) + 1):
                pm_occ[t - g.pm_min] -= 1

        for idx in range(problem.am_off[si], problem.am_off[si + 1]):
            r = problem.am_dur[idx]
            best_a, best_mx = None, None
            for a in am_window(m):
                mx = add_am(a, r)
                del_am(a, r)
                if best_mx is None or mx < best_mx:
                    best_a, best_mx = a, mx
            add_am(best_a, r)
            local_am.append((idx, best_a))
            cur = max(cur, best_mx)
        end = m + problem.delta[si]
        for idx in range(problem.pm_off[si], problem.pm_off[si + 1]):
            r = problem.pm_dur[idx]
            best_d, best_mx = None, None
            for d in range(end + inst.lam, min(end + inst.mu, g.pm_max) + 1):
                mx = add_pm(d, r)
                del_pm(d, r)
                if best_mx is None or mx < best_mx:
                    best_d, best_mx = d, mx
            add_pm(best_d, r)
            local_pm.append((idx, best_d))
            cur = max(cur, best_mx)
        if commit:
            for idx, a in local_am:
                am_slots_chosen[idx] = a
            for idx, d in local_pm:
                pm_slots_chosen[idx] = d
            return cur
        for idx, a in local_am:
            del_am(a, problem.am_dur[idx])
        for idx, d in local_pm:
            del_pm(d, problem.pm_dur[idx])
        return cur

    for pos in range(problem.n_schools):
        si = problem.order[pos]
        sid = problem.school_ids[si]
        best_m, best_val = None, None
        for m in problem.domains[sid]:
            if (
                distinct_cap is not None
                and m not in used_starts
                and len(used_starts) >= distinct_cap
            ):
                continue
            val = place_routes(si, m, commit=False)
            if best_val is None or val < best_val:
                best_m, best_val = m, val
        if best_m is None:
            return None
        starts[si] = best_m
        used_starts.add(best_m)
        peak = place_routes(si, best_m, commit=True)

    return starts, am_slots_chosen, pm_slots_chosen, peak


def _run_kernel(
    problem: _Problem,
    mode: int,
    *,
    c: Optional[DisutilityMatrix] = None,
    caps: Sequence[tuple[float, int]] = (),
    z_cap: int = 0,
    distinct_cap: Optional[int] = None,
    seed_starts: Optional[Sequence[int]] = None,
    suffix_min: Optional[Sequence[float]] = None,
    lb: int = 0,
    best_peak_init: int = INFEASIBLE_PEAK,
    best_sum_init: float = math.inf,
    deadline: float = 0.0,
    kernel=None,
) -> dict:
    g = problem.grid
    caps_theta = _double_array([t for t, _ in caps] or [0.0])
    caps_k = _int_array([k for _, k in caps] or [0])
    seeds = _int_array(list(seed_starts) if seed_starts else [-1] * problem.n_schools)
    suffix = _double_array(list(suffix_min) if suffix_min else [0.0] * (problem.n_schools + 1))
    am_forced, pm_forced = problem.forced_arrays()
    if kernel is None:
        kernel = _kernel
    return kernel.run_search(
        mode,
        problem.n_schools,
        g.am_slots,
        g.pm_min,
        g.pm_max,
        problem.inst.alpha,
        problem.inst.beta,
        problem.inst.lam,
        problem.inst.mu,
        problem.order,
        problem.dom_flat,
        problem.dom_off,
        problem.delta,
        problem.am_dur,
        problem.am_off,
        problem.pm_dur,
        problem.pm_off,
        problem.disut_array(c),
        caps_theta,
        caps_k,
        len(caps),
        z_cap,
        0 if distinct_cap is None else distinct_cap,
        seeds,
        1 if seed_starts else 0,
        suffix,
        am_forced,
        pm_forced,
        lb,
        best_peak_init,
        best_sum_init,
        deadline,
    )


def _deadline(time_limit: Optional[float]) -> float:
    return time.monotonic() + time_limit if time_limit else 0.0


def _infeasible_report(kind: str, school_id: int, elapsed: float) -> SolveReport:
    return SolveReport(
        status="infeasible",
        objective_kind=kind,
        infeasible_school=school_id,
        elapsed=elapsed,
        optimal=True,
        message=f"school {school_id} has no candidate start slot",
    )


# ---------------------------------------------------------------------------
# Bus-minimizing solves
# ---------------------------------------------------------------------------

def _peak_of(inst: Instance, sched: Schedule) -> int:
    return occupancy(inst, sched).peak


def _solve_peak(
    inst: Instance,
    domains: dict[int, tuple[int, ...]],
    *,
    objective_kind: str,
    distinct_start_limit: Optional[int],
    time_limit: Optional[float],
    seed_schedule: Optional[Schedule] = None,
) -> SolveReport:
    t0 = time.monotonic()
    problem = _Problem(inst, domains)
    lb = lower_bound(inst, domains)
    greedy = _greedy_schedule(problem, distinct_start_limit)
    deadline = _deadline(time_limit)

    # A caller-supplied feasible schedule caps the search from above; used by
    # sweeps so the bound can only tighten as the feasible set grows.
    incumbent: Optional[Schedule] = None
    incumbent_peak = INFEASIBLE_PEAK
    if greedy is not None:
        incumbent = problem.schedule_from(greedy[0], greedy[1], greedy[2])
        incumbent_peak = greedy[3]
    if seed_schedule is not None:
        in_domain = all(
            seed_schedule.start[sid] in problem.domains[sid]
            for sid in problem.school_ids
        )
        under_cap = (
            distinct_start_limit is None
            or len(set(seed_schedule.start.values())) <= distinct_start_limit
        )
        if in_domain and under_cap:
            seed_peak = _peak_of(inst, seed_schedule)
            if seed_peak < incumbent_peak:
                incumbent = seed_schedule
                incumbent_peak = seed_peak

    if incumbent is not None and incumbent_peak <= lb:
        return SolveReport(
            status="optimal", objective_kind=objective_kind,
            objective_value=incumbent.buses, schedule=incumbent, optimal=True,
            nodes=0, elapsed=time.monotonic() - t0, lower_bound=lb,
        )

    res = _run_kernel(
        problem, 0, distinct_cap=distinct_start_limit,
        lb=lb, best_peak_init=incumbent_peak, deadline=deadline,
    )
    elapsed = time.monotonic() - t0

    if res["found"]:
        sched = problem.schedule_from(res["starts"], res["am"], res["pm"])
    else:
        sched = incumbent

    if sched is None:
        if res["timed_out"]:
            return SolveReport(
                status="unknown", objective_kind=objective_kind,
                nodes=res["nodes"], elapsed=elapsed, lower_bound=lb,
                message="time limit hit before any schedule was found",
            )
        return SolveReport(
            status="infeasible", objective_kind=objective_kind, optimal=True,
            nodes=res["nodes"], elapsed=elapsed,
            message="no start assignment satisfies the distinct-start cap",
        )

    proven = (not res["timed_out"]) or sched.buses <= lb
    return SolveReport(
        status="optimal" if proven else "feasible",
        objective_kind=objective_kind,
        objective_value=sched.buses,
        schedule=sched,
        optimal=proven,
        nodes=res["nodes"],
        elapsed=elapsed,
        lower_bound=lb,
    )


def solve_base(
    inst: Instance,
    *,
    distinct_start_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
    seed_schedule: Optional[Schedule] = None,
) -> SolveReport:
    """Fewest buses over all bell assignments (the fleet-minimum problem)."""
    _validated(inst)
    domains, blocked = start_domains(inst)
    if domains is None:
        return _infeasible_report("buses", blocked, 0.0)
    return _solve_peak(
        inst, domains, objective_kind="buses",
        distinct_start_limit=distinct_start_limit, time_limit=time_limit,
        seed_schedule=seed_schedule,
    )


def solve_fair_tau(
    inst: Instance,
    tau_minutes: float,
    *,
    distinct_start_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
    seed_schedule: Optional[Schedule] = None,
) -> SolveReport:
    """Fewest buses when no school may move more than tau minutes.

    seed_schedule primes the incumbent; in a tau sweep, passing the previous
    point's schedule keeps reported values monotone even under time limits,
    because a schedule feasible at tau stays feasible at every larger tau.
    """
    _validated(inst)
    if tau_minutes < 0:
        raise ValueError(f"tau must be nonnegative, got {tau_minutes}")
    domains, blocked = start_domains(inst, tau_minutes=tau_minutes)
    if domains is None:
        return _infeasible_report("buses", blocked, 0.0)
    report = _solve_peak(
        inst, domains, objective_kind="buses",
        distinct_start_limit=distinct_start_limit, time_limit=time_limit,
        seed_schedule=seed_schedule,
    )
    report.extra["tau_minutes"] = tau_minutes
    return report


# ---------------------------------------------------------------------------
# Feasibility under caps
# ---------------------------------------------------------------------------

def _pi_of(inst: Instance, c: DisutilityMatrix, starts: Mapping[int, int]) -> dict[int, float]:
    return {s.id: c.value(s.id, starts[s.id]) for s in inst.schools}


def _caps_ok(pi: Mapping[int, float], caps: Sequence[tuple[float, int]]) -> bool:
    for theta, k in caps:
        if sum(1 for v in pi.values() if v > theta + _TOL) > k:
            return False
    return True


def _decide(
    inst: Instance,
    z_bar: int,
    domains: dict[int, tuple[int, ...]],
    caps: Sequence[tuple[float, int]],
    c: Optional[DisutilityMatrix],
    seed: Optional[Schedule],
    deadline: float,
) -> tuple[Optional[Schedule], bool, int]:
    """(schedule | None, proven_infeasible, nodes). Caps need a matrix."""
    if seed is not None:
        if all(seed.start[sid] in set(domains[sid]) for sid in domains):
            if (not caps or _caps_ok(_pi_of(inst, c, seed.start), caps)) and seed.buses <= z_bar:
                return seed, False, 0
    problem = _Problem(inst, domains)
    greedy = _greedy_schedule(problem, None)
    if greedy is not None and greedy[3] <= z_bar:
        sched = problem.schedule_from(greedy[0], greedy[1], greedy[2])
        if not caps or _caps_ok(_pi_of(inst, c, sched.start), caps):
            return sched, False, 0
    seed_starts = None
    if seed is not None:
        by_school = [seed.start[sid] for sid in problem.school_ids]
        if all(
            by_school[i] in problem.domains[problem.school_ids[i]]
            for i in range(problem.n_schools)
        ):
            seed_starts = by_school
    res = _run_kernel(
        problem, 1, c=c, caps=caps, z_cap=z_bar,
        seed_starts=seed_starts, deadline=deadline,
    )
    if res["found"]:
        return problem.schedule_from(res["starts"], res["am"], res["pm"]), False, res["nodes"]
    return None, not res["timed_out"], res["nodes"]


def feasible_with(
    inst: Instance,
    z_bar: int,
    domains: Optional[Mapping[int, Iterable[int]]] = None,
    counting_caps: Sequence[tuple[float, int]] = (),
    *,
    c: Optional[DisutilityMatrix] = None,
    seed_schedule: Optional[Schedule] = None,
    time_limit: Optional[float] = None,
) -> Optional[Schedule]:
    """Any schedule with peak <= z_bar and, for each cap (theta, k), at most
    k schools whose disutility exceeds theta. None when there is none (or
    the time limit expires first; pair with solve_* when the distinction
    matters)."""
    _validated(inst)
    if z_bar < 0:
        raise ValueError(f"z_bar must be nonnegative, got {z_bar}")
    if counting_caps and c is None:
        raise ValueError("counting caps need a disutility matrix")
    full, blocked = start_domains(inst, restrict=domains)
    if full is None:
        return None
    sched, _, _ = _decide(
        inst, z_bar, full, tuple(counting_caps), c, seed_schedule,
        _deadline(time_limit),
    )
    return sched


# ---------------------------------------------------------------------------
# Threshold objectives
# ---------------------------------------------------------------------------

def _distinct_sorted(values: Iterable[float]) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v > out[-1] + _TOL:
            out.append(v)
    return out


def _domain_values(
    inst: Instance, c: DisutilityMatrix, domains: Mapping[int, Sequence[int]]
) -> list[float]:
    vals = []
    for s in inst.schools:
        for m in domains[s.id]:
            vals.append(c.value(s.id, m))
    return _distinct_sorted(vals)


def solve_minimax(
    inst: Instance,
    c: DisutilityMatrix,
    z_bar: int,
    *,
    time_limit: Optional[float] = None,
) -> SolveReport:
    """Smallest worst-school disutility achievable with at most z_bar buses.

    Binary search over the distinct matrix values: a threshold v is feasible
    when some schedule with peak <= z_bar keeps every school at disutility
    <= v, which is a plain feasibility question on shrunken start domains.
    """
    _validated(inst)
    t0 = time.monotonic()
    deadline = _deadline(time_limit)
    domains, blocked = start_domains(inst)
    if domains is None:
        return _infeasible_report("pi_max", blocked, time.monotonic() - t0)

    nodes = 0
    sched, proven_inf, n = _decide(inst, z_bar, domains, (), None, None, deadline)
    nodes += n
    if sched is None:
        status = "infeasible" if proven_inf else "unknown"
        return SolveReport(
            status=status, objective_kind="pi_max", nodes=nodes,
            elapsed=time.monotonic() - t0, z_bar=z_bar, optimal=proven_inf,
            message=f"no schedule runs on {z_bar} buses"
            if proven_inf else "time limit hit before feasibility was settled",
        )

    values = _domain_values(inst, c, domains)
    start_pi = max(_pi_of(inst, c, sched.start).values())
    hi = 0
    while values[hi] < start_pi - _TOL:
        hi += 1
    best_sched = sched
    best_val = values[hi]
    lo = 0
    timed_out = False
    while lo < hi:
        mid = (lo + hi) // 2
        sub, blocked = start_domains(inst, threshold=values[mid], c=c)
        if sub is None:
            lo = mid + 1
            continue
        cand, proven_inf, n = _decide(inst, z_bar, sub, (), None, None, deadline)
        nodes += n
        if cand is not None:
            best_sched, best_val = cand, values[mid]
            hi = mid
        elif proven_inf:
            lo = mid + 1
        else:
            timed_out = True
            break

    report = SolveReport(
        status="feasible" if timed_out else "optimal",
        objective_kind="pi_max",
        objective_value=best_val,
        schedule=best_sched,
        optimal=not timed_out,
        nodes=nodes,
        elapsed=time.monotonic() - t0,
        z_bar=z_bar,
        equity=evaluate(inst, best_sched, c),
    )
    return report


def solve_minimax_weighted(
    inst: Instance,
    c: DisutilityMatrix,
    phi: float,
    *,
    time_limit: Optional[float] = None,
) -> SolveReport:
    """Minimize buses + phi * worst disutility over every bus count.

    Sweeps z_bar upward from the unconstrained minimum, re-solving the
    minimax subproblem; stops once the worst disutility bottoms out at its
    floor or extra buses can no longer pay for themselves.
    """
    _validated(inst)
    if phi < 0:
        raise ValueError(f"phi must be nonnegative, got {phi}")
    t0 = time.monotonic()
    deadline = _deadline(time_limit)

    base = solve_base(inst, time_limit=time_limit)
    if base.status != "optimal":
        base.objective_kind = "weighted"
        return base
    z_star = base.objective_value

    domains, _ = start_domains(inst)
    floor = max(min(c.value(s.id, m) for m in domains[s.id]) for s in inst.schools)

    nodes = base.nodes
    best: Optional[SolveReport] = None
    best_obj = math.inf
    best_z = z_star
    timed_out = False
    z_cap_hard = z_star + len(inst.routes) + 1
    z = z_star
    while z <= z_cap_hard:
        remaining = None if not time_limit else max(deadline - time.monotonic(), 0.01)
        mm = solve_minimax(inst, c, z, time_limit=remaining)
        nodes += mm.nodes
        if mm.status not in ("optimal", "feasible"):
            timed_out = True
            break
        obj = z + phi * mm.objective_value
        if obj < best_obj - 1e-12:
            best, best_obj, best_z = mm, obj, z
        if not mm.optimal:
            timed_out = True
            break
        if mm.objective_value <= floor + _TOL:
            break
        if z + 1 + phi * floor >= best_obj - 1e-12:
            break
        z += 1

    if best is None:
        return SolveReport(
            status="unknown", objective_kind="weighted", nodes=nodes,
            elapsed=time.monotonic() - t0,
            message="time limit hit before any trade-off point was solved",
        )
    return SolveReport(
        status="feasible" if timed_out else "optimal",
        objective_kind="weighted",
        objective_value=best_obj,
        schedule=best.schedule,
        optimal=not timed_out,
        nodes=nodes,
        elapsed=time.monotonic() - t0,
        z_bar=best_z,
        equity=best.equity,
        extra={"phi": phi, "pi_max": best.objective_value, "z_star": z_star},
    )


def solve_lexmin(
    inst: Instance,
    c: DisutilityMatrix,
    z_bar: int,
    *,
    per_step_time_limit: Optional[float] = None,
) -> SolveReport:
    """Lexicographic minimax: minimize the worst disutility, then the second
    worst given the worst, and so on through all schools.

    Rank j is pinned via counting caps: with psi_1..psi_{j-1} fixed, a value
    v is feasible for rank j when some schedule keeps every school at or
    under psi_1, at most k schools above psi_{k+1} for each pinned rank, and
    at most j-1 schools above v. Each rank is a binary search over matrix
    values, warm started from the previous witness."""
    _validated(inst)
    t0 = time.monotonic()
    n_schools = len(inst.schools)

    first = solve_minimax(inst, c, z_bar, time_limit=per_step_time_limit)
    if first.status in ("infeasible", "unknown"):
        first.objective_kind = "lexmin"
        return first

    nodes = first.nodes
    witness = first.schedule
    fixed = [first.objective_value]
    timed_out_step = None if first.optimal else 1

    if timed_out_step is None:
        domains, _ = start_domains(inst, threshold=fixed[0], c=c)
        values = _domain_values(inst, c, domains)
        for j_star in range(2, n_schools + 1):
            deadline = _deadline(per_step_time_limit)
            w_sorted = sorted(_pi_of(inst, c, witness.start).values(), reverse=True)
            ceiling = w_sorted[j_star - 1]
            hi = 0
            while values[hi] < ceiling - _TOL:
                hi += 1
            lo = 0
            step_caps = [(fixed[k - 1], k - 1) for k in range(1, j_star)]
            while lo < hi:
                mid = (lo + hi) // 2
                caps = step_caps + [(values[mid], j_star - 1)]
                cand, proven_inf, n = _decide(
                    inst, z_bar, domains, caps, c, witness, deadline
                )
                nodes += n
                if cand is not None:
                    witness = cand
                    hi = mid
                elif proven_inf:
                    lo = mid + 1
                else:
                    timed_out_step = j_star
                    break
            if timed_out_step is not None:
                break
            fixed.append(values[hi])

    final_sorted = sorted(_pi_of(inst, c, witness.start).values(), reverse=True)
    psi = tuple(fixed) + tuple(final_sorted[len(fixed):])
    report = SolveReport(
        status="optimal" if timed_out_step is None else "feasible",
        objective_kind="lexmin",
        objective_value=psi,
        schedule=witness,
        optimal=timed_out_step is None,
        nodes=nodes,
        elapsed=time.monotonic() - t0,
        z_bar=z_bar,
        equity=evaluate(inst, witness, c),
    )
    if timed_out_step is not None:
        report.extra["timed_out_step"] = timed_out_step
    return report


def _polish_total(
    inst: Instance,
    c: DisutilityMatrix,
    z_bar: int,
    domains: dict[int, tuple[int, ...]],
    sched: Schedule,
    deadline: float,
) -> tuple[Schedule, int]:
    """Coordinate descent on start slots: move one school at a time to a
    cheaper slot whenever the rest of the timetable can absorb the move.

    Every probe pins the other schools to their incumbent slots, so each
    decision subproblem is small; probes that do not close quickly are
    abandoned rather than chased. The total strictly decreases with each
    accepted move, so the sweep terminates on its own.
    """
    nodes = 0
    best = sched
    pi = _pi_of(inst, c, best.start)
    improved = True
    while improved and time.monotonic() < deadline:
        improved = False
        for sid in sorted(best.start, key=lambda s: pi[s], reverse=True):
            cur_val = c.value(sid, best.start[sid])
            better = sorted(
                (m for m in domains[sid] if c.value(sid, m) < cur_val),
                key=lambda m: c.value(sid, m),
            )
            for m in better:
                if time.monotonic() >= deadline:
                    return best, nodes
                probe = {
                    other: ((m,) if other == sid else (best.start[other],))
                    for other in best.start
                }
                cand, _, used = _decide(
                    inst, z_bar, probe, (), None, None,
                    min(deadline, time.monotonic() + 0.25),
                )
                nodes += used
                if cand is not None:
                    best = cand
                    pi = _pi_of(inst, c, best.start)
                    improved = True
                    break
    return best, nodes


def solve_minsum(
    inst: Instance,
    c: DisutilityMatrix,
    z_bar: int,
    *,
    time_limit: Optional[float] = None,
) -> SolveReport:
    """Smallest total disutility achievable with at most z_bar buses."""
    _validated(inst)
    t0 = time.monotonic()
    deadline = _deadline(time_limit)
    domains, blocked = start_domains(inst)
    if domains is None:
        return _infeasible_report("total", blocked, time.monotonic() - t0)

    # a quick feasibility pass gives an incumbent to return (and to prune
    # with) even if the value-ordered search then stalls in bad regions
    seed, seed_total, probe_nodes = None, math.inf, 0
    sched0, proven_empty, probe_nodes = _decide(
        inst, z_bar, domains, (), None, None, deadline
    )
    if sched0 is not None:
        # local improvement before the exhaustive pass: a tighter incumbent
        # prunes far more of the value-ordered search than it costs to find
        now = time.monotonic()
        polish_deadline = deadline
        if math.isfinite(deadline):
            polish_deadline = min(deadline, now + 0.4 * max(0.0, deadline - now))
        seed, pol_nodes = _polish_total(
            inst, c, z_bar, domains, sched0, polish_deadline
        )
        probe_nodes += pol_nodes
        seed_total = sum(_pi_of(inst, c, seed.start).values())
    elif proven_empty:
        return SolveReport(
            status="infeasible", objective_kind="total", optimal=True,
            nodes=probe_nodes, elapsed=time.monotonic() - t0, z_bar=z_bar,
            message=f"no schedule runs on {z_bar} buses",
        )

    problem = _Problem(inst, domains)
    problem.order_by_value(c)
    mins = {
        sid: min(c.value(sid, m) for m in problem.domains[sid])
        for sid in problem.school_ids
    }
    suffix = [0.0] * (problem.n_schools + 1)
    for pos in range(problem.n_schools - 1, -1, -1):
        sid = problem.school_ids[problem.order[pos]]
        suffix[pos] = suffix[pos + 1] + mins[sid]

    res = _run_kernel(
        problem, 2, c=c, z_cap=z_bar, suffix_min=suffix,
        best_sum_init=seed_total, deadline=deadline,
    )
    nodes = res["nodes"] + probe_nodes
    if res["found"]:
        sched = problem.schedule_from(res["starts"], res["am"], res["pm"])
        total = res["best_sum"]
        if res["timed_out"] and time.monotonic() < deadline:
            sched, pol_nodes = _polish_total(
                inst, c, z_bar, domains, sched, deadline
            )
            nodes += pol_nodes
            total = sum(_pi_of(inst, c, sched.start).values())
    elif seed is not None:
        sched = seed
        total = seed_total
    else:
        return SolveReport(
            status="unknown", objective_kind="total", nodes=nodes,
            elapsed=time.monotonic() - t0, z_bar=z_bar,
            message="time limit hit before any schedule was found",
        )
    return SolveReport(
        status="feasible" if res["timed_out"] else "optimal",
        objective_kind="total",
        objective_value=total,
        schedule=sched,
        optimal=not res["timed_out"],
        nodes=nodes,
        elapsed=time.monotonic() - t0,
        z_bar=z_bar,
        equity=evaluate(inst, sched, c),
    )
