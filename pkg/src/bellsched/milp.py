"""Integer-programming formulations of the scheduling problems.

Models are plain data (variables, linear constraints, objective), built
deterministically so exports are byte-stable. No solver is linked; models go
out through the MPS writer and solutions come back through the reader, with
validate_solution as the referee.

Variables follow one naming scheme across every formulation:

  x[i,n,m]  morning route i of school n arrives at slot m
  u[n,m]    school n starts at slot m
  y[i,n,m]  afternoon route i of school n departs at slot m
  v[n,m]    school n ends its day at slot m
  z         fleet size
  k[m]      some school starts at slot m (distinct-start cap only)
  pi[n]     school n's disutility
  pimax     worst disutility
  psi[j]    j-th largest disutility
  h[j,n]    school n counts toward the j smallest ranks

where i numbers each school's routes of one period by route id. Constraint
rows carry descriptive names (one_start[n], am_window[n,i,m], am_cap[m],
route_once_am[n,i], one_end[n], pm_window[n,i,m], pm_cap[m], link[n,m],
route_once_pm[n,i], pi_def[n], pimax_ge[n], fix_buses, fix_psi[j], card[j],
rank_relax[j,n], psi_order[j], start_implies_used[n,m], distinct_limit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .equity import DisutilityMatrix
from .instance import Instance, validate_instance
from .schedule import Schedule, check_schedule_shape

__all__ = [
    "Variable",
    "Constraint",
    "MilpModel",
    "MilpSolution",
    "build_base",
    "build_minimax_weighted",
    "build_minimax_eps",
    "build_lexmin_full",
    "build_lexmin_step",
    "validate_solution",
    "solution_from_schedule",
    "HAZARD_RATIO",
]

INF = math.inf
_TOL = 1e-6

# Objective coefficient spreads at or past this ratio are numerically unsafe
# for double-precision solvers; full-model lexicographic objectives get
# flagged so callers can switch to the iterative formulation.
HAZARD_RATIO = 1e8


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # 'binary' | 'integer' | 'continuous'
    lb: float = 0.0
    ub: float = 1.0


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # '<=', '>=', '='
    rhs: float


@dataclass
class MilpModel:
    name: str
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[str, float], ...]
    metadata: dict = field(default_factory=dict)

    def variable_map(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    def rows_named(self, prefix: str) -> list[Constraint]:
        return [c for c in self.constraints if c.name.startswith(prefix)]

    def vars_named(self, prefix: str) -> list[Variable]:
        return [v for v in self.variables if v.name.startswith(prefix)]


@dataclass
class MilpSolution:
    values: dict[str, float]
    objective: Optional[float] = None
    status: str = "unknown"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _checked(inst: Instance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))


def _am_routes_numbered(inst: Instance, school_id: int):
    routes = sorted(inst.am_routes(school_id), key=lambda r: r.id)
    return list(enumerate(routes, start=1))


def _pm_routes_numbered(inst: Instance, school_id: int):
    routes = sorted(inst.pm_routes(school_id), key=lambda r: r.id)
    return list(enumerate(routes, start=1))


class _ModelSink:
    def __init__(self, name: str):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: list[tuple[str, float]] = []
        self.metadata: dict = {}

    def var(self, name: str, kind: str, lb: float = 0.0, ub: float = 1.0) -> str:
        self.variables.append(Variable(name, kind, lb, ub))
        return name

    def row(self, name: str, terms, sense: str, rhs: float) -> None:
        self.constraints.append(Constraint(name, tuple(terms), sense, rhs))

    def build(self) -> MilpModel:
        return MilpModel(
            name=self.name,
            variables=tuple(self.variables),
            constraints=tuple(self.constraints),
            objective=tuple(self.objective),
            metadata=self.metadata,
        )


def _emit_core(sink: _ModelSink, inst: Instance, *,
               require_unique_assignment: bool,
               distinct_start_limit: Optional[int]) -> None:
    """Variables and rows shared by every formulation: assignment, windows,
    capacity, day linkage, and the optional distinct-start cap."""
    g = inst.grid
    m_all = range(1, g.am_slots + 1)
    m_start = range(inst.beta + 1, g.am_slots + 1)
    v_range = range(g.pm_min, g.pm_max - inst.lam + 1)
    y_range = range(g.pm_min, g.pm_max + 1)

    for s in inst.schools:
        for i, r in _am_routes_numbered(inst, s.id):
            for m in m_all:
                sink.var(f"x[{i},{s.id},{m}]", "binary")
    for s in inst.schools:
        allowed = set(s.allowed_starts)
        for m in m_start:
            if m in allowed:
                sink.var(f"u[{s.id},{m}]", "binary")
            else:
                sink.var(f"u[{s.id},{m}]", "binary", lb=0.0, ub=0.0)
    for s in inst.schools:
        for i, r in _pm_routes_numbered(inst, s.id):
            for m in y_range:
                sink.var(f"y[{i},{s.id},{m}]", "binary")
    for s in inst.schools:
        for m in v_range:
            sink.var(f"v[{s.id},{m}]", "binary")
    sink.var("z", "integer", lb=0.0, ub=INF)
    if distinct_start_limit is not None:
        for m in m_start:
            sink.var(f"k[{m}]", "binary")

    # each school starts exactly once
    for s in inst.schools:
        sink.row(
            f"one_start[{s.id}]",
            [(f"u[{s.id},{m}]", 1.0) for m in m_start],
            "=", 1.0,
        )
    # a start slot needs a route arriving inside its window
    for s in inst.schools:
        for i, r in _am_routes_numbered(inst, s.id):
            for m in m_start:
                lo = max(m - inst.alpha, 1)
                hi = m - inst.beta
                terms = [(f"u[{s.id},{m}]", 1.0)]
                terms += [(f"x[{i},{s.id},{t}]", -1.0) for t in range(lo, hi + 1)]
                sink.row(f"am_window[{s.id},{i},{m}]", terms, "<=", 0.0)
    # morning fleet capacity per slot
    for m in m_all:
        terms = []
        for s in inst.schools:
            for i, r in _am_routes_numbered(inst, s.id):
                for t in range(m, min(m + r.duration_slots - 1, g.am_slots) + 1):
                    terms.append((f"x[{i},{s.id},{t}]", 1.0))
        terms.append(("z", -1.0))
        sink.row(f"am_cap[{m}]", terms, "<=", 0.0)
    if require_unique_assignment:
        for s in inst.schools:
            for i, r in _am_routes_numbered(inst, s.id):
                sink.row(
                    f"route_once_am[{s.id},{i}]",
                    [(f"x[{i},{s.id},{m}]", 1.0) for m in m_all],
                    "=", 1.0,
                )
    # each school ends exactly once
    for s in inst.schools:
        sink.row(
            f"one_end[{s.id}]",
            [(f"v[{s.id},{m}]", 1.0) for m in v_range],
            "=", 1.0,
        )
    # an end slot needs a route departing inside its window
    for s in inst.schools:
        for i, r in _pm_routes_numbered(inst, s.id):
            for m in v_range:
                terms = [(f"v[{s.id},{m}]", 1.0)]
                terms += [
                    (f"y[{i},{s.id},{t}]", -1.0)
                    for t in range(m + inst.lam, min(m + inst.mu, g.pm_max) + 1)
                ]
                sink.row(f"pm_window[{s.id},{i},{m}]", terms, "<=", 0.0)
    # afternoon fleet capacity per slot
    for m in y_range:
        terms = []
        for s in inst.schools:
            for i, r in _pm_routes_numbered(inst, s.id):
                for t in range(max(m - r.duration_slots + 1, g.pm_min), m + 1):
                    terms.append((f"y[{i},{s.id},{t}]", 1.0))
        terms.append(("z", -1.0))
        sink.row(f"pm_cap[{m}]", terms, "<=", 0.0)
    # a start fixes the dismissal day_length slots later
    for s in inst.schools:
        for m in m_start:
            end = m + s.day_length
            if end < g.pm_min or end > g.pm_max:
                continue
            if end <= g.pm_max - inst.lam:
                sink.row(
                    f"link[{s.id},{m}]",
                    [(f"u[{s.id},{m}]", 1.0), (f"v[{s.id},{end}]", -1.0)],
                    "=", 0.0,
                )
            else:
                # end slot exists but leaves no room for departures
                sink.row(
                    f"link[{s.id},{m}]",
                    [(f"u[{s.id},{m}]", 1.0)],
                    "=", 0.0,
                )
    if require_unique_assignment:
        for s in inst.schools:
            for i, r in _pm_routes_numbered(inst, s.id):
                sink.row(
                    f"route_once_pm[{s.id},{i}]",
                    [(f"y[{i},{s.id},{m}]", 1.0) for m in y_range],
                    "=", 1.0,
                )
    if distinct_start_limit is not None:
        for s in inst.schools:
            for m in m_start:
                sink.row(
                    f"start_implies_used[{s.id},{m}]",
                    [(f"u[{s.id},{m}]", 1.0), (f"k[{m}]", -1.0)],
                    "<=", 0.0,
                )
        sink.row(
            "distinct_limit",
            [(f"k[{m}]", 1.0) for m in m_start],
            "<=", float(distinct_start_limit),
        )
    sink.metadata["require_unique_assignment"] = require_unique_assignment
    sink.metadata["distinct_start_limit"] = distinct_start_limit


def _emit_pi(sink: _ModelSink, inst: Instance, c: DisutilityMatrix) -> None:
    m_start = range(inst.beta + 1, inst.grid.am_slots + 1)
    for s in inst.schools:
        vals = [c.value(s.id, m) for m in m_start]
        sink.var(f"pi[{s.id}]", "continuous", lb=min(vals), ub=max(vals))
    for s in inst.schools:
        terms = [(f"pi[{s.id}]", 1.0)]
        for m in m_start:
            cv = c.value(s.id, m)
            if cv != 0.0:
                terms.append((f"u[{s.id},{m}]", -cv))
        sink.row(f"pi_def[{s.id}]", terms, "=", 0.0)


def _global_value_range(inst: Instance, c: DisutilityMatrix) -> tuple[float, float]:
    vals = [
        c.value(s.id, m)
        for s in inst.schools
        for m in range(inst.beta + 1, inst.grid.am_slots + 1)
    ]
    return min(vals), max(vals)


def build_base(
    inst: Instance,
    *,
    require_unique_assignment: bool = True,
    distinct_start_limit: Optional[int] = None,
) -> MilpModel:
    """Fleet-minimization model: minimize z."""
    _checked(inst)
    sink = _ModelSink("base")
    _emit_core(
        sink, inst,
        require_unique_assignment=require_unique_assignment,
        distinct_start_limit=distinct_start_limit,
    )
    sink.objective = [("z", 1.0)]
    sink.metadata["formulation"] = "base"
    return sink.build()


def build_minimax_weighted(
    inst: Instance,
    c: DisutilityMatrix,
    phi: float,
    *,
    require_unique_assignment: bool = True,
    distinct_start_limit: Optional[int] = None,
) -> MilpModel:
    """Joint trade-off model: minimize z + phi * pimax."""
    _checked(inst)
    if phi < 0:
        raise ValueError(f"phi must be nonnegative, got {phi}")
    sink = _ModelSink("minimax_weighted")
    _emit_core(
        sink, inst,
        require_unique_assignment=require_unique_assignment,
        distinct_start_limit=distinct_start_limit,
    )
    _emit_pi(sink, inst, c)
    lo, hi = _global_value_range(inst, c)
    sink.var("pimax", "continuous", lb=lo, ub=hi)
    for s in inst.schools:
        sink.row(
            f"pimax_ge[{s.id}]",
            [("pimax", 1.0), (f"pi[{s.id}]", -1.0)],
            ">=", 0.0,
        )
    sink.objective = [("z", 1.0), ("pimax", phi)]
    sink.metadata["formulation"] = "minimax_weighted"
    sink.metadata["phi"] = phi
    return sink.build()


def build_minimax_eps(
    inst: Instance,
    c: DisutilityMatrix,
    z_bar: int,
    *,
    require_unique_assignment: bool = True,
    distinct_start_limit: Optional[int] = None,
) -> MilpModel:
    """Fixed-fleet fairness model: minimize pimax subject to z = z_bar."""
    _checked(inst)
    if z_bar < 1:
        raise ValueError(f"z_bar must be at least 1, got {z_bar}")
    sink = _ModelSink("minimax_eps")
    _emit_core(
        sink, inst,
        require_unique_assignment=require_unique_assignment,
        distinct_start_limit=distinct_start_limit,
    )
    _emit_pi(sink, inst, c)
    lo, hi = _global_value_range(inst, c)
    sink.var("pimax", "continuous", lb=lo, ub=hi)
    for s in inst.schools:
        sink.row(
            f"pimax_ge[{s.id}]",
            [("pimax", 1.0), (f"pi[{s.id}]", -1.0)],
            ">=", 0.0,
        )
    sink.row("fix_buses", [("z", 1.0)], "=", float(z_bar))
    sink.objective = [("pimax", 1.0)]
    sink.metadata["formulation"] = "minimax_eps"
    sink.metadata["fixed_buses"] = z_bar
    return sink.build()


def _emit_rank_block(
    sink: _ModelSink, inst: Instance, c: DisutilityMatrix, j_range: Sequence[int]
) -> None:
    """psi/h variables plus the rank-counting rows for the given j values.

    card[j] forces at least N+1-j schools into the "at or below psi_j" group;
    rank_relax[j,n] releases pi_n <= psi_j exactly for grouped schools, using
    the matrix value spread as the big-M constant.
    """
    n_schools = len(inst.schools)
    lo, hi = _global_value_range(inst, c)
    big = hi - lo
    for j in j_range:
        sink.var(f"psi[{j}]", "continuous", lb=lo, ub=hi)
    for j in j_range:
        for s in inst.schools:
            sink.var(f"h[{j},{s.id}]", "binary")
    for j in j_range:
        sink.row(
            f"card[{j}]",
            [(f"h[{j},{s.id}]", 1.0) for s in inst.schools],
            ">=", float(n_schools + 1 - j),
        )
    for j in j_range:
        for s in inst.schools:
            sink.row(
                f"rank_relax[{j},{s.id}]",
                [(f"pi[{s.id}]", 1.0), (f"psi[{j}]", -1.0), (f"h[{j},{s.id}]", big)],
                "<=", big,
            )
    for j in j_range[:-1]:
        sink.row(
            f"psi_order[{j}]",
            [(f"psi[{j}]", 1.0), (f"psi[{j + 1}]", -1.0)],
            ">=", 0.0,
        )


def build_lexmin_full(
    inst: Instance,
    c: DisutilityMatrix,
    z_star: int,
    pimax_star: float,
    epsilon: float = 0.1,
    *,
    require_unique_assignment: bool = True,
    distinct_start_limit: Optional[int] = None,
) -> MilpModel:
    """One-shot lexicographic model: minimize sum_j epsilon^j psi[j].

    The geometric objective only emulates true lexicographic order while the
    coefficient spread stays within floating-point headroom; metadata flags
    the model hazardous once (1/epsilon)^(N-1) reaches 1e8, at which point
    the iterative per-rank model is the trustworthy route.
    """
    _checked(inst)
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    sink = _ModelSink("lexmin_full")
    _emit_core(
        sink, inst,
        require_unique_assignment=require_unique_assignment,
        distinct_start_limit=distinct_start_limit,
    )
    _emit_pi(sink, inst, c)
    n_schools = len(inst.schools)
    j_all = list(range(1, n_schools + 1))
    _emit_rank_block(sink, inst, c, j_all)
    sink.row("fix_buses", [("z", 1.0)], "=", float(z_star))
    sink.row("fix_psi[1]", [("psi[1]", 1.0)], "=", float(pimax_star))
    sink.objective = [(f"psi[{j}]", epsilon ** j) for j in j_all]
    ratio = (1.0 / epsilon) ** (n_schools - 1)
    sink.metadata["formulation"] = "lexmin_full"
    sink.metadata["fixed_buses"] = z_star
    sink.metadata["pimax_star"] = pimax_star
    sink.metadata["epsilon"] = epsilon
    sink.metadata["coefficient_ratio"] = ratio
    sink.metadata["hazardous"] = ratio >= HAZARD_RATIO
    return sink.build()


def build_lexmin_step(
    inst: Instance,
    c: DisutilityMatrix,
    z_star: int,
    pimax_star: float,
    j_star: int,
    fixed_psi: Sequence[float] = (),
    *,
    require_unique_assignment: bool = True,
    distinct_start_limit: Optional[int] = None,
) -> MilpModel:
    """Iterative lexicographic model: minimize psi[j_star] with earlier ranks
    pinned (psi[1] = pimax_star, psi[2..j_star-1] = fixed_psi)."""
    _checked(inst)
    n_schools = len(inst.schools)
    if not (2 <= j_star <= n_schools):
        raise ValueError(f"j_star must be in [2, {n_schools}], got {j_star}")
    fixed_psi = tuple(float(v) for v in fixed_psi)
    if len(fixed_psi) != j_star - 2:
        raise ValueError(
            f"fixed_psi must pin ranks 2..{j_star - 1} "
            f"({j_star - 2} values), got {len(fixed_psi)}"
        )
    chain = (float(pimax_star),) + fixed_psi
    for a, b in zip(chain, chain[1:]):
        if b > a + 1e-9:
            raise ValueError(
                f"pinned rank values must be nonincreasing, got {a} before {b}"
            )
    sink = _ModelSink("lexmin_step")
    _emit_core(
        sink, inst,
        require_unique_assignment=require_unique_assignment,
        distinct_start_limit=distinct_start_limit,
    )
    _emit_pi(sink, inst, c)
    j_all = list(range(1, j_star + 1))
    _emit_rank_block(sink, inst, c, j_all)
    sink.row("fix_buses", [("z", 1.0)], "=", float(z_star))
    sink.row("fix_psi[1]", [("psi[1]", 1.0)], "=", float(pimax_star))
    for j, val in enumerate(fixed_psi, start=2):
        sink.row(f"fix_psi[{j}]", [(f"psi[{j}]", 1.0)], "=", val)
    sink.objective = [(f"psi[{j_star}]", 1.0)]
    sink.metadata["formulation"] = "lexmin_step"
    sink.metadata["fixed_buses"] = z_star
    sink.metadata["pimax_star"] = pimax_star
    sink.metadata["j_star"] = j_star
    sink.metadata["fixed_psi"] = fixed_psi
    return sink.build()


# ---------------------------------------------------------------------------
# Validation and conversion
# ---------------------------------------------------------------------------

def validate_solution(model: MilpModel, sol: MilpSolution) -> list[str]:
    """Feasibility referee. Returns violations (empty = accepted).

    Every declared variable must have a value; a missing one is a caller
    error and raises. Integrality and bounds use a 1e-6 tolerance, as does
    each row and the objective restatement (when the solution carries one).
    """
    violations: list[str] = []
    values: dict[str, float] = {}
    for var in model.variables:
        if var.name not in sol.values:
            raise ValueError(f"missing value for variable {var.name}")
        raw = float(sol.values[var.name])
        val = raw
        if var.kind in ("binary", "integer"):
            snapped = round(raw)
            if abs(raw - snapped) > _TOL:
                violations.append(f"integrality: {var.name} = {raw}")
            else:
                val = float(snapped)
        if val < var.lb - _TOL or val > var.ub + _TOL:
            violations.append(
                f"bounds: {var.name} = {raw} outside [{var.lb}, {var.ub}]"
            )
        values[var.name] = val

    for row in model.constraints:
        act = sum(coef * values[name] for name, coef in row.terms)
        bad = (
            (row.sense == "<=" and act > row.rhs + _TOL)
            or (row.sense == ">=" and act < row.rhs - _TOL)
            or (row.sense == "=" and abs(act - row.rhs) > _TOL)
        )
        if bad:
            violations.append(
                f"row {row.name}: activity {act} violates {row.sense} {row.rhs}"
            )

    if sol.objective is not None:
        obj = sum(coef * values[name] for name, coef in model.objective)
        if abs(obj - sol.objective) > _TOL:
            violations.append(
                f"objective mismatch: stated {sol.objective}, computed {obj}"
            )
    return violations


def solution_from_schedule(
    inst: Instance,
    model: MilpModel,
    sched: Schedule,
    c: Optional[DisutilityMatrix] = None,
) -> MilpSolution:
    """Express an engine schedule in the model's variables.

    Works for every formulation built here; rank and worst-case variables
    are derived from the schedule's own disutilities, and z honors a
    fixed-fleet row when the model carries one.
    """
    check_schedule_shape(inst, sched)
    values = {v.name: 0.0 for v in model.variables}

    def put(name: str, val: float) -> None:
        if name not in values:
            raise ValueError(f"model has no variable {name}")
        values[name] = val

    for s in inst.schools:
        put(f"u[{s.id},{sched.start[s.id]}]", 1.0)
        put(f"v[{s.id},{sched.end[s.id]}]", 1.0)
        for i, r in _am_routes_numbered(inst, s.id):
            put(f"x[{i},{s.id},{sched.am_arrival[r.id]}]", 1.0)
        for i, r in _pm_routes_numbered(inst, s.id):
            put(f"y[{i},{s.id},{sched.pm_departure[r.id]}]", 1.0)

    fixed = model.metadata.get("fixed_buses")
    values["z"] = float(fixed if fixed is not None else sched.buses)

    if model.metadata.get("distinct_start_limit") is not None:
        for m in sorted(set(sched.start.values())):
            put(f"k[{m}]", 1.0)

    needs_pi = any(v.name.startswith("pi[") for v in model.variables)
    if needs_pi:
        if c is None:
            raise ValueError("this model prices disutility; pass the matrix")
        pi = {s.id: c.value(s.id, sched.start[s.id]) for s in inst.schools}
        for sid, val in pi.items():
            put(f"pi[{sid}]", val)
        if "pimax" in values:
            values["pimax"] = max(pi.values())
        ranked = sorted(pi.values(), reverse=True)
        j = 1
        while f"psi[{j}]" in values:
            psi_j = ranked[j - 1]
            values[f"psi[{j}]"] = psi_j
            for sid, val in pi.items():
                values[f"h[{j},{sid}]"] = 1.0 if val <= psi_j + 1e-9 else 0.0
            j += 1

    objective = sum(coef * values[name] for name, coef in model.objective)
    return MilpSolution(values=values, objective=objective, status="feasible")
