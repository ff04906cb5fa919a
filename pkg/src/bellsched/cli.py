"""Command-line front end.

Subcommands:

  generate      draw a random instance and write it as JSON
  solve         run one objective and write report/equity/bus files
  sweep         re-solve across a parameter range, one CSV row per point
  export        write a formulation as a free-format MPS file
  validate      check an instance file, or a solution file against a model
  assign-buses  turn a solve report back into a per-route bus roster

Exit codes: 0 success/optimal, 2 stopped at the time limit without proof,
3 proved infeasible, 64 usage error, 65 unreadable or invalid input data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import engine
from .engine import SolveReport
from .equity import (
    DisutilityMatrix,
    abs_deviation_matrix,
    custom_matrix,
    evaluate,
    price_of_fairness,
    scenario4_matrix,
)
from .fleet import assign_buses
from .instance import (
    GeneratorSpec,
    Instance,
    generate_instance,
    load_instance,
    save_instance,
    slot_clock,
    validate_instance,
)
from .milp import (
    MilpModel,
    build_base,
    build_lexmin_full,
    build_lexmin_step,
    build_minimax_eps,
    build_minimax_weighted,
    solution_from_schedule,
    validate_solution,
)
from .mps import export_mps, read_solution
from .schedule import (
    Schedule,
    check_schedule_shape,
    schedule_from_dict,
    schedule_to_dict,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_TIME_LIMIT = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64
EXIT_DATA = 65

EQUITY_CSV_HEADER = (
    "school_id,label,current_start,new_start,change_minutes,"
    "abs_change_minutes,disutility"
)
SWEEP_CSV_HEADER = "param,buses,objective,pi_max,avg_change_min,std_change_min,pof"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _DataError(Exception):
    """Input file exists but its content is unusable."""


def _load(path: str) -> Instance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise _DataError(f"cannot read {path}: {exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise _DataError(f"{path}: {exc}") from exc


def _matrix(args, inst: Instance) -> DisutilityMatrix:
    kind = args.disutility
    if kind == "abs":
        return abs_deviation_matrix(inst, unit=args.disutility_unit)
    if kind == "scenario4":
        return scenario4_matrix(inst)
    if kind == "custom":
        if not args.disutility_file:
            raise _DataError("--disutility custom requires --disutility-file")
        try:
            with open(args.disutility_file, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise _DataError(f"cannot read {args.disutility_file}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise _DataError(f"{args.disutility_file}: {exc}") from exc
        if not isinstance(data, dict) or data.get("version") != 1:
            raise _DataError(
                f"{args.disutility_file}: expected an object with version 1"
            )
        raw = data.get("values")
        if not isinstance(raw, dict):
            raise _DataError(f"{args.disutility_file}: missing 'values' object")
        values = {}
        try:
            for sid, per_slot in raw.items():
                for slot, val in per_slot.items():
                    values[(int(sid), int(slot))] = float(val)
        except (TypeError, ValueError, AttributeError) as exc:
            raise _DataError(f"{args.disutility_file}: {exc}") from exc
        try:
            return custom_matrix(inst, values)
        except ValueError as exc:
            raise _DataError(f"{args.disutility_file}: {exc}") from exc
    raise _DataError(f"unknown disutility kind {kind!r}")


def _resolve_buses(spec: str, inst: Instance, time_limit: Optional[float]) -> int:
    """Parse --buses: a literal count, 'auto' (solve for the minimum), or
    'auto+K' (minimum plus K spares)."""
    spec = spec.strip().lower()
    extra = 0
    if spec.startswith("auto"):
        tail = spec[4:]
        if tail:
            if not tail.startswith("+"):
                raise _DataError(f"bad --buses value {spec!r}")
            try:
                extra = int(tail[1:])
            except ValueError:
                raise _DataError(f"bad --buses value {spec!r}") from None
            if extra < 0:
                raise _DataError(f"bad --buses value {spec!r}")
        base = engine.solve_base(inst, time_limit=time_limit)
        if base.schedule is None:
            raise _DataError("could not establish a bus minimum for --buses auto")
        return base.schedule.buses + extra
    try:
        z_bar = int(spec)
    except ValueError:
        raise _DataError(f"bad --buses value {spec!r}") from None
    if z_bar < 1:
        raise _DataError(f"--buses must be at least 1, got {z_bar}")
    return z_bar


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _solution_model(
    inst: Instance, args, report: SolveReport, c: Optional[DisutilityMatrix]
) -> tuple[Optional[MilpModel], Optional[dict]]:
    """The formulation a solve's schedule should be checked against, plus a
    tag describing how to rebuild it."""
    obj = args.objective
    if report.schedule is None:
        return None, None
    if obj == "base":
        return build_base(inst), {"formulation": "base"}
    if obj == "fair-tau":
        domains, blocked = engine.start_domains(inst, tau_minutes=args.tau)
        if domains is None:
            return None, None
        restricted = inst.restrict_starts(domains)
        return build_base(restricted), {
            "formulation": "base",
            "tau_minutes": args.tau,
        }
    if obj == "minsum":
        return build_base(inst), {"formulation": "base"}
    if obj == "minimax":
        return (
            build_minimax_eps(inst, c, report.z_bar),
            {"formulation": "minimax_eps", "z_bar": report.z_bar},
        )
    if obj == "weighted":
        return (
            build_minimax_weighted(inst, c, args.phi),
            {"formulation": "minimax_weighted", "phi": args.phi},
        )
    if obj == "lexmin":
        psi = report.objective_value
        n = len(inst.schools)
        if n < 2 or psi is None:
            return (
                build_minimax_eps(inst, c, report.z_bar),
                {"formulation": "minimax_eps", "z_bar": report.z_bar},
            )
        fixed = tuple(psi[1:n - 1])
        return (
            build_lexmin_step(inst, c, report.z_bar, psi[0], n, fixed),
            {
                "formulation": "lexmin_step",
                "z_bar": report.z_bar,
                "pimax_star": psi[0],
                "j_star": n,
                "fixed_psi": list(fixed),
            },
        )
    return None, None


def _report_json(
    inst: Instance, args, report: SolveReport, c: Optional[DisutilityMatrix],
    model_tag: Optional[dict],
) -> dict:
    doc = {
        "version": 1,
        "instance_file": os.path.basename(args.instance),
        "objective": args.objective,
        "objective_kind": report.objective_kind,
        "status": report.status,
        "optimal": report.optimal,
        "objective_value": (
            list(report.objective_value)
            if isinstance(report.objective_value, tuple)
            else report.objective_value
        ),
    }
    if report.schedule is not None:
        doc.update(schedule_to_dict(report.schedule))
        doc["start_clock"] = {
            str(s.id): slot_clock(inst.grid, report.schedule.start[s.id])
            for s in inst.schools
        }
        doc["end_clock"] = {
            str(s.id): slot_clock(inst.grid, report.schedule.end[s.id])
            for s in inst.schools
        }
        if c is not None:
            doc["equity"] = evaluate(inst, report.schedule, c).to_dict()
    doc["stats"] = {
        "nodes": report.nodes,
        "elapsed_seconds": round(report.elapsed, 6),
        "z_bar": report.z_bar,
        "lower_bound": report.lower_bound,
        "kernel": engine.KERNEL_TAG,
        "message": report.message,
        "infeasible_school": report.infeasible_school,
    }
    doc["stats"].update(report.extra)
    if model_tag is not None:
        doc["model"] = model_tag
    return doc


def _write_equity_csv(inst: Instance, sched: Schedule,
                      c: DisutilityMatrix, path: str) -> None:
    lines = [EQUITY_CSV_HEADER]
    mins = inst.grid.slot_minutes
    for s in inst.schools:
        new = sched.start[s.id]
        change = (new - s.current_start) * mins
        lines.append(
            f"{s.id},{s.label},{s.current_start},{new},"
            f"{change},{abs(change)},{c.value(s.id, new):.6g}"
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    c = _matrix(args, inst)

    if args.objective == "base":
        report = engine.solve_base(
            inst, distinct_start_limit=args.distinct_starts,
            time_limit=args.time_limit,
        )
    elif args.objective == "fair-tau":
        if args.tau is None:
            raise _DataError("--objective fair-tau requires --tau")
        report = engine.solve_fair_tau(
            inst, args.tau, distinct_start_limit=args.distinct_starts,
            time_limit=args.time_limit,
        )
    elif args.objective == "weighted":
        report = engine.solve_minimax_weighted(
            inst, c, args.phi, time_limit=args.time_limit,
        )
    else:
        z_bar = _resolve_buses(args.buses, inst, args.time_limit)
        if args.objective == "minimax":
            report = engine.solve_minimax(inst, c, z_bar, time_limit=args.time_limit)
        elif args.objective == "lexmin":
            report = engine.solve_lexmin(
                inst, c, z_bar, per_step_time_limit=args.time_limit,
            )
        else:
            report = engine.solve_minsum(inst, c, z_bar, time_limit=args.time_limit)

    os.makedirs(args.out, exist_ok=True)
    model, model_tag = _solution_model(inst, args, report, c)
    doc = _report_json(inst, args, report, c, model_tag)
    report_path = os.path.join(args.out, "report.json")
    with open(report_path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"status: {report.status}  objective: {doc['objective_value']}")
    print(f"wrote {report_path}")

    if report.schedule is not None:
        _write_equity_csv(
            inst, report.schedule, c, os.path.join(args.out, "equity.csv")
        )
        roster = assign_buses(inst, report.schedule)
        with open(os.path.join(args.out, "buses.csv"), "w", encoding="ascii") as fh:
            fh.write(roster.to_csv_text())
        if model is not None:
            sol = solution_from_schedule(inst, model, report.schedule, c)
            bad = validate_solution(model, sol)
            if bad:
                # engine output failing its own formulation is a bug worth
                # surfacing loudly, not hiding in a file
                raise _DataError(
                    "solution fails model check: " + "; ".join(bad[:5])
                )
            lines = [f"# objective {model.name}"]
            lines.append(f"=obj= {sol.objective!r}")
            for name in sorted(sol.values):
                val = sol.values[name]
                if val != 0.0:
                    lines.append(f"{name} {val!r}")
            sol_path = os.path.join(args.out, "solution.txt")
            with open(sol_path, "w", encoding="ascii") as fh:
                fh.write("\n".join(lines) + "\n")
        print(f"wrote {os.path.join(args.out, 'equity.csv')}")
        print(f"wrote {os.path.join(args.out, 'buses.csv')}")

    if report.status == "infeasible":
        return EXIT_INFEASIBLE
    if report.status in ("feasible", "unknown"):
        return EXIT_TIME_LIMIT
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _cmd_sweep(args) -> int:
    inst = _load(args.instance)
    c = _matrix(args, inst)
    try:
        points = [int(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError:
        raise _DataError(f"bad --values list {args.values!r}") from None
    if not points:
        raise _DataError("--values is empty")

    if args.param == "buses" and min(points) < 0:
        raise _DataError("bus sweep values are offsets from the minimum "
                         "fleet and must be nonnegative")

    base = engine.solve_base(inst, time_limit=args.time_limit)
    if base.schedule is None:
        raise _DataError("cannot sweep: bus minimum unsolved within the limit")
    z_star = base.schedule.buses

    points = sorted(set(points))

    # solve tau points in ascending order, seeding each from the last: a
    # schedule legal at tau stays legal at larger tau, so reported values
    # are monotone even when individual solves hit the time limit
    reports: dict[int, SolveReport] = {}
    if args.param == "tau":
        seed = base.schedule
        for p in points:
            rep = engine.solve_fair_tau(
                inst, float(p), time_limit=args.time_limit, seed_schedule=seed
            )
            if rep.schedule is not None:
                seed = rep.schedule
            reports[p] = rep

    rows = []
    worst_status = "optimal"
    for p in points:
        if args.param == "tau":
            rep = reports[p]
        else:
            z_bar = z_star + p
            if args.objective == "lexmin":
                rep = engine.solve_lexmin(
                    inst, c, z_bar, per_step_time_limit=args.time_limit
                )
            elif args.objective == "minsum":
                rep = engine.solve_minsum(inst, c, z_bar, time_limit=args.time_limit)
            else:
                rep = engine.solve_minimax(inst, c, z_bar, time_limit=args.time_limit)
        if rep.status in ("feasible", "unknown") and worst_status == "optimal":
            worst_status = rep.status
        if rep.schedule is None:
            rows.append({
                "param": p, "buses": "", "objective": "", "pi_max": "",
                "avg_change_min": "", "std_change_min": "", "pof": "",
            })
            if rep.status == "infeasible" and worst_status == "optimal":
                worst_status = "infeasible"
            continue
        eq = evaluate(inst, rep.schedule, c)
        buses = rep.schedule.buses
        objective = buses if args.param == "tau" else rep.objective_value
        rows.append({
            "param": p,
            "buses": buses,
            "objective": objective,
            "pi_max": eq.pi_max,
            "avg_change_min": eq.avg_abs_change_minutes,
            "std_change_min": eq.std_abs_change_minutes,
            "pof": price_of_fairness(buses, z_star),
        })

    if args.format == "json":
        text = json.dumps(
            {"z_star": z_star, "rows": rows}, indent=2, sort_keys=True
        ) + "\n"
    else:
        lines = [SWEEP_CSV_HEADER]
        for r in rows:
            lines.append(
                ",".join(
                    _csv_cell(r[k])
                    for k in (
                        "param", "buses", "objective", "pi_max",
                        "avg_change_min", "std_change_min", "pof",
                    )
                )
            )
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    if worst_status == "infeasible":
        return EXIT_INFEASIBLE
    if worst_status != "optimal":
        return EXIT_TIME_LIMIT
    return EXIT_OK


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (tuple, list)):
        return ";".join(f"{x:.6g}" for x in v)
    return str(v)


# ---------------------------------------------------------------------------
# export / validate / assign-buses / generate
# ---------------------------------------------------------------------------

def _build_formulation(args, inst: Instance, form: str):
    """Build the MILP named by a CLI formulation tag using the shared flags
    (--buses, --phi, --epsilon, --pimax-star, --j-star, --fixed-psi, --tau,
    --distinct-starts). Raises _DataError on missing or contradictory flags."""
    form = form.replace("_", "-")
    known = ("base", "minimax-weighted", "minimax-eps", "lexmin-full", "lexmin-step")
    if form not in known:
        raise _DataError(f"unknown formulation {form!r}; pick one of {', '.join(known)}")
    c = _matrix(args, inst) if form != "base" else None
    if form == "base":
        if args.tau is not None:
            domains, blocked = engine.start_domains(inst, tau_minutes=args.tau)
            if domains is None:
                raise _DataError(f"no start slot within tau for school {blocked}")
            inst = inst.restrict_starts(domains)
        return build_base(inst, distinct_start_limit=args.distinct_starts), inst, c
    if form == "minimax-weighted":
        model = build_minimax_weighted(
            inst, c, args.phi, distinct_start_limit=args.distinct_starts
        )
        return model, inst, c
    if args.buses is None:
        raise _DataError(f"formulation {form} requires --buses")
    z_bar = _resolve_buses(args.buses, inst, args.time_limit)
    if form == "minimax-eps":
        model = build_minimax_eps(
            inst, c, z_bar, distinct_start_limit=args.distinct_starts
        )
        return model, inst, c
    if args.pimax_star is None:
        raise _DataError(f"formulation {form} requires --pimax-star")
    if form == "lexmin-full":
        model = build_lexmin_full(
            inst, c, z_bar, args.pimax_star, args.epsilon,
            distinct_start_limit=args.distinct_starts,
        )
        if model.metadata["hazardous"]:
            print(
                "warning: objective coefficient ratio "
                f"{model.metadata['coefficient_ratio']:.3g} is beyond "
                "safe floating-point range; prefer lexmin-step",
                file=sys.stderr,
            )
        return model, inst, c
    if args.j_star is None:
        raise _DataError("formulation lexmin-step requires --j-star")
    fixed = ()
    if args.fixed_psi:
        try:
            fixed = tuple(float(v) for v in args.fixed_psi.split(",") if v != "")
        except ValueError:
            raise _DataError(f"bad --fixed-psi list {args.fixed_psi!r}") from None
    try:
        model = build_lexmin_step(
            inst, c, z_bar, args.pimax_star, args.j_star, fixed,
            distinct_start_limit=args.distinct_starts,
        )
    except ValueError as exc:
        raise _DataError(str(exc)) from exc
    return model, inst, c


def _cmd_export(args) -> int:
    inst = _load(args.instance)
    model, _, _ = _build_formulation(args, inst, args.formulation)
    text = export_mps(model)
    with open(args.output, "w", encoding="ascii") as fh:
        fh.write(text)
    n_int = sum(1 for v in model.variables if v.kind != "continuous")
    print(
        f"wrote {args.output}: {len(model.variables)} variables "
        f"({n_int} integer), {len(model.constraints)} rows"
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    # parse leniently so semantic problems are reported, not raised
    try:
        inst = load_instance(args.instance, check=False)
    except OSError as exc:
        raise _DataError(f"{args.instance}: {exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise _DataError(f"{args.instance}: {exc}") from exc
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return 1
    print(f"ok: {len(inst.schools)} schools, {len(inst.routes)} routes")
    if args.report:
        try:
            with open(args.report, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            sched = schedule_from_dict(doc)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise _DataError(f"{args.report}: {exc}") from exc
        try:
            check_schedule_shape(inst, sched)
        except ValueError as exc:
            print(f"invalid schedule: {exc}")
            return 1
        print(f"schedule ok: {sched.buses} buses")
    if (args.formulation is None) != (args.solution is None):
        raise _DataError("solution checking needs both a formulation and a "
                         "solution file")
    if args.formulation is not None:
        model, _, _ = _build_formulation(args, inst, args.formulation)
        try:
            sol = read_solution(args.solution, model)
        except OSError as exc:
            raise _DataError(f"{args.solution}: {exc}") from exc
        except ValueError as exc:
            raise _DataError(f"{args.solution}: {exc}") from exc
        violations = validate_solution(model, sol)
        if violations:
            for v in violations:
                print(f"violated: {v}")
            return 1
        obj = "unstated" if sol.objective is None else f"{sol.objective!r}"
        print(f"solution ok against {model.name}: objective {obj}")
    return EXIT_OK


def _cmd_assign_buses(args) -> int:
    inst = _load(args.instance)
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        sched = schedule_from_dict(doc)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _DataError(f"{args.report}: {exc}") from exc
    roster = assign_buses(inst, sched)
    with open(args.output, "w", encoding="ascii") as fh:
        fh.write(roster.to_csv_text())
    print(f"wrote {args.output}: fleet of {roster.fleet_size}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(
        scenario=args.scenario, schools=args.schools, am_routes=args.am_routes
    )
    try:
        inst = generate_instance(spec, args.seed)
    except ValueError as exc:
        raise _DataError(str(exc)) from exc
    save_instance(inst, args.output)
    print(
        f"wrote {args.output}: scenario {args.scenario}, "
        f"{len(inst.schools)} schools, {len(inst.routes)} routes, seed {args.seed}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def _add_disutility_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--disutility", choices=("abs", "scenario4", "custom"), default="abs",
        help="cost of moving a school's start (default: abs minutes)",
    )
    p.add_argument("--disutility-file", default=None,
                   help="JSON cost table for --disutility custom")
    p.add_argument(
        "--disutility-unit", choices=("minutes", "slots"), default="minutes",
        help="unit for the abs matrix (default: minutes)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellsched", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="draw a random instance")
    p_gen.add_argument("--scenario", choices=("I", "II", "III", "IV"), default="I")
    p_gen.add_argument("--schools", type=int, default=None)
    p_gen.add_argument("--am-routes", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--output", default="instance.json")
    p_gen.set_defaults(func=_cmd_generate)

    p_solve = sub.add_parser("solve", help="optimize one objective")
    p_solve.add_argument("instance")
    p_solve.add_argument(
        "--objective",
        choices=("base", "fair-tau", "minimax", "weighted", "lexmin", "minsum"),
        default="base",
    )
    p_solve.add_argument("--buses", default="auto",
                         help="bus budget: INT, auto, or auto+K (default auto)")
    p_solve.add_argument("--tau", type=float, default=None,
                         help="max start change in minutes (fair-tau)")
    p_solve.add_argument("--phi", type=float, default=0.1,
                         help="weight on worst disutility (weighted)")
    p_solve.add_argument("--distinct-starts", type=int, default=None,
                         help="cap on distinct start slots (base/fair-tau)")
    p_solve.add_argument("--time-limit", type=float, default=None,
                         metavar="SECONDS")
    p_solve.add_argument("--out", default=".",
                         help="directory for report.json and friends")
    _add_disutility_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="re-solve across a parameter range")
    p_sweep.add_argument("instance")
    p_sweep.add_argument("--param", choices=("tau", "buses"), required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated integers; tau in minutes, "
                              "buses as offsets above the minimum fleet")
    p_sweep.add_argument("--objective", choices=("minimax", "lexmin", "minsum"),
                         default="minimax",
                         help="objective per bus-sweep point (default minimax)")
    p_sweep.add_argument("--time-limit", type=float, default=None,
                         metavar="SECONDS")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("-o", "--output", default=None,
                         help="output file (default: stdout)")
    _add_disutility_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_exp = sub.add_parser("export", help="write a formulation as MPS")
    p_exp.add_argument("instance")
    p_exp.add_argument(
        "--formulation",
        choices=("base", "minimax-weighted", "minimax-eps",
                 "lexmin-full", "lexmin-step"),
        default="base",
    )
    p_exp.add_argument("--buses", default=None,
                       help="bus budget: INT, auto, or auto+K")
    p_exp.add_argument("--phi", type=float, default=0.1)
    p_exp.add_argument("--epsilon", type=float, default=0.1)
    p_exp.add_argument("--pimax-star", type=float, default=None)
    p_exp.add_argument("--j-star", type=int, default=None)
    p_exp.add_argument("--fixed-psi", default=None,
                       help="comma-separated pinned rank values")
    p_exp.add_argument("--tau", type=float, default=None,
                       help="restrict starts before building (base only)")
    p_exp.add_argument("--distinct-starts", type=int, default=None)
    p_exp.add_argument("--time-limit", type=float, default=None,
                       metavar="SECONDS")
    p_exp.add_argument("-o", "--output", default="model.mps")
    _add_disutility_flags(p_exp)
    p_exp.set_defaults(func=_cmd_export)

    p_val = sub.add_parser(
        "validate",
        help="check an instance file, optionally a solution against a model",
    )
    p_val.add_argument("instance")
    p_val.add_argument("formulation", nargs="?", default=None,
                       help="model tag to check a solution file against")
    p_val.add_argument("solution", nargs="?", default=None,
                       help="solution file in 'name value' lines")
    p_val.add_argument("--report", default=None,
                       help="also check the schedule in this solve report")
    p_val.add_argument("--buses", default=None,
                       help="bus budget for fixed-fleet formulations")
    p_val.add_argument("--phi", type=float, default=0.1)
    p_val.add_argument("--epsilon", type=float, default=0.1)
    p_val.add_argument("--pimax-star", type=float, default=None)
    p_val.add_argument("--j-star", type=int, default=None)
    p_val.add_argument("--fixed-psi", default=None)
    p_val.add_argument("--tau", type=float, default=None)
    p_val.add_argument("--distinct-starts", type=int, default=None)
    p_val.add_argument("--time-limit", type=float, default=None,
                       metavar="SECONDS")
    _add_disutility_flags(p_val)
    p_val.set_defaults(func=_cmd_validate)

    p_ab = sub.add_parser("assign-buses", help="bus roster from a solve report")
    p_ab.add_argument("instance")
    p_ab.add_argument("--report", required=True)
    p_ab.add_argument("-o", "--output", default="buses.csv")
    p_ab.set_defaults(func=_cmd_assign_buses)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _DataError as exc:
        print(f"bellsched: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:
        # argparse signals usage problems (and --help) by exiting; keep the
        # code but return it so embedders never see an exception
        code = exc.code
        if code is None:
            return EXIT_OK
        return code if isinstance(code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
