"""Exhaustive reference solver for tiny instances.

This is the trust anchor for the search engine: a plain nested enumeration
over every start assignment and every route placement, with no pruning, no
symmetry reduction, and no shared code with the branch-and-bound kernel. It
exists to be obviously correct, not fast, and it refuses search spaces past
ten million leaves outright.

A start slot is a candidate when it is allowed for the school and the implied
dismissal slot fits the afternoon window (dismissal between pm_min and
pm_max - lambda); that restriction is part of the problem statement, not an
optimization, and the engine applies the same one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..equity import DisutilityMatrix
from ..instance import Instance, validate_instance

__all__ = ["OracleResult", "SearchSpaceError", "enumerate_all", "brute_force_oracle"]

MAX_LEAVES = 10_000_000

_LEX_TOL = 1e-9


class SearchSpaceError(ValueError):
    """Raised when the instance is too large to enumerate."""

    def __init__(self, size: float):
        self.size = size
        super().__init__(
            f"search space holds about {size:.3g} complete schedules, "
            f"beyond the enumeration limit of {MAX_LEAVES}"
        )


@dataclass(frozen=True)
class OracleResult:
    """Exact optima from full enumeration.

    min_peak is over every complete schedule (None only when no start
    assignment is possible at all). The three disutility objectives are
    restricted to schedules with peak <= z_bar and are None when that set is
    empty or when no z_bar / matrix was given.
    """

    min_peak: Optional[int]
    pi_max: Optional[float]
    lexmin: Optional[tuple[float, ...]]
    total: Optional[float]


def _lex_less(a: Sequence[float], b: Sequence[float]) -> bool:
    for x, y in zip(a, b):
        if x < y - _LEX_TOL:
            return True
        if x > y + _LEX_TOL:
            return False
    return False


def _candidate_starts(inst: Instance, domains) -> list[list[int]]:
    g = inst.grid
    out = []
    for s in inst.schools:
        cand = [
            m
            for m in s.allowed_starts
            if g.pm_min <= m + s.day_length <= g.pm_max - inst.lam
        ]
        if domains is not None and s.id in domains:
            keep = set(domains[s.id])
            cand = [m for m in cand if m in keep]
        out.append(cand)
    return out


def enumerate_all(
    inst: Instance,
    c: Optional[DisutilityMatrix] = None,
    z_bar: Optional[int] = None,
    domains: Optional[Mapping[int, Sequence[int]]] = None,
) -> OracleResult:
    """Visit every complete schedule once; track all optima in one pass."""
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))

    g = inst.grid
    starts_per_school = _candidate_starts(inst, domains)

    # Refuse oversized spaces before recursing. Window widths bound the
    # number of placements per route whatever the start turns out to be.
    size = 1.0
    for cand in starts_per_school:
        size *= len(cand)
    am_width = inst.alpha - inst.beta + 1
    pm_width = inst.mu - inst.lam + 1
    for r in inst.routes:
        size *= am_width if r.period == "AM" else pm_width
    if size > MAX_LEAVES:
        raise SearchSpaceError(size)

    schools = inst.schools
    n = len(schools)
    am_by_school = [inst.am_routes(s.id) for s in schools]
    pm_by_school = [inst.pm_routes(s.id) for s in schools]

    am_occ = [0] * (g.am_slots + 1)  # 1-based
    pm_len = g.pm_max - g.pm_min + 1
    pm_occ = [0] * pm_len
    chosen_start = [0] * n

    best_peak: Optional[int] = None
    best_pimax: Optional[float] = None
    best_lex: Optional[tuple[float, ...]] = None
    best_total: Optional[float] = None

    def visit_leaf() -> None:
        nonlocal best_peak, best_pimax, best_lex, best_total
        peak = max(max(am_occ), max(pm_occ) if pm_len else 0)
        if best_peak is None or peak < best_peak:
            best_peak = peak
        if z_bar is None or c is None or peak > z_bar:
            return
        pi = [c.value(schools[i].id, chosen_start[i]) for i in range(n)]
        pimax = max(pi)
        if best_pimax is None or pimax < best_pimax:
            best_pimax = pimax
        total = sum(pi)
        if best_total is None or total < best_total:
            best_total = total
        vec = tuple(sorted(pi, reverse=True))
        if best_lex is None or _lex_less(vec, best_lex):
            best_lex = vec

    def place_pm(si: int, ri: int) -> None:
        if ri == len(pm_by_school[si]):
            assign_school(si + 1)
            return
        route = pm_by_school[si][ri]
        end = chosen_start[si] + schools[si].day_length
        lo = end + inst.lam
        hi = min(end + inst.mu, g.pm_max)
        for dep in range(lo, hi + 1):
            top = min(dep + route.duration_slots - 1, g.pm_max)
            for t in range(dep, top + 1):
                pm_occ[t - g.pm_min] += 1
            place_pm(si, ri + 1)
            for t in range(dep, top + 1):
                pm_occ[t - g.pm_min] -= 1

    def place_am(si: int, ri: int) -> None:
        if ri == len(am_by_school[si]):
            place_pm(si, 0)
            return
        route = am_by_school[si][ri]
        m = chosen_start[si]
        lo = max(m - inst.alpha, 1)
        hi = m - inst.beta
        for a in range(lo, hi + 1):
            bot = max(a - route.duration_slots + 1, 1)
            for t in range(bot, a + 1):
                am_occ[t] += 1
            place_am(si, ri + 1)
            for t in range(bot, a + 1):
                am_occ[t] -= 1

    def assign_school(si: int) -> None:
        if si == n:
            visit_leaf()
            return
        for m in starts_per_school[si]:
            chosen_start[si] = m
            place_am(si, 0)

    if all(starts_per_school):
        assign_school(0)

    return OracleResult(
        min_peak=best_peak, pi_max=best_pimax, lexmin=best_lex, total=best_total
    )


def brute_force_oracle(
    inst: Instance,
    c: Optional[DisutilityMatrix],
    objective: str,
    z_bar: Optional[int] = None,
    domains: Optional[Mapping[int, Sequence[int]]] = None,
):
    """Exact optimum by enumeration.

    objective: 'base' (fewest buses; returns int), 'minimax' (float),
    'lexmin' (tuple sorted worst-first), or 'minsum' (float). The three
    disutility objectives need both a matrix and z_bar. Returns None when the
    requested feasible set is empty.
    """
    if objective not in ("base", "minimax", "lexmin", "minsum"):
        raise ValueError(f"unknown objective {objective!r}")
    if objective != "base":
        if c is None:
            raise ValueError(f"objective {objective!r} needs a disutility matrix")
        if z_bar is None:
            raise ValueError(f"objective {objective!r} needs z_bar")
    res = enumerate_all(inst, c, z_bar, domains)
    if objective == "base":
        return res.min_peak
    if objective == "minimax":
        return res.pi_max
    if objective == "lexmin":
        return res.lexmin
    return res.total
