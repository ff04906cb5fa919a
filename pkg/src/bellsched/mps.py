"""Free-format MPS export and solver-solution import.

The writer emits one coefficient per line and keeps variable and row order
exactly as declared in the model, so the same model always yields the same
bytes. Integer and binary variables sit between INTORG/INTEND markers. Every
variable gets an explicit objective entry (zero included) so columns exist
even when a variable appears in no row.

The reader accepts the common "name value" text format many solvers print
(one variable per line, '#' comments, optional '=obj= value' line).
"""

from __future__ import annotations

import math
from typing import Optional, TextIO, Union

from .milp import MilpModel, MilpSolution

__all__ = ["export_mps", "read_solution"]

_SENSE_TAG = {"<=": "L", ">=": "G", "=": "E"}


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.12g}"


def export_mps(model: MilpModel, path: Optional[str] = None) -> str:
    """Serialize the model; optionally also write it to path."""
    by_var: dict[str, list[tuple[str, float]]] = {v.name: [] for v in model.variables}
    for row in model.constraints:
        for name, coef in row.terms:
            if name not in by_var:
                raise ValueError(f"row {row.name} references unknown variable {name}")
            by_var[name].append((row.name, coef))
    obj = dict(model.objective)
    for name in obj:
        if name not in by_var:
            raise ValueError(f"objective references unknown variable {name}")

    out: list[str] = []
    out.append(f"NAME {model.name}")
    out.append("ROWS")
    out.append(" N obj")
    for row in model.constraints:
        out.append(f" {_SENSE_TAG[row.sense]} {row.name}")

    out.append("COLUMNS")
    marker = 0
    integral_open = False
    for var in model.variables:
        integral = var.kind in ("binary", "integer")
        if integral and not integral_open:
            out.append(f"    MARKER{marker} 'MARKER' 'INTORG'")
            marker += 1
            integral_open = True
        elif not integral and integral_open:
            out.append(f"    MARKER{marker} 'MARKER' 'INTEND'")
            marker += 1
            integral_open = False
        out.append(f"    {var.name} obj {_num(obj.get(var.name, 0.0))}")
        for row_name, coef in by_var[var.name]:
            out.append(f"    {var.name} {row_name} {_num(coef)}")
    if integral_open:
        out.append(f"    MARKER{marker} 'MARKER' 'INTEND'")

    out.append("RHS")
    for row in model.constraints:
        if row.rhs != 0.0:
            out.append(f"    RHS {row.name} {_num(row.rhs)}")

    out.append("BOUNDS")
    for var in model.variables:
        if var.kind == "binary":
            if var.lb == var.ub:
                out.append(f" FX BND {var.name} {_num(var.lb)}")
            else:
                out.append(f" BV BND {var.name}")
        elif var.kind == "integer":
            out.append(f" LI BND {var.name} {_num(var.lb)}")
            if math.isinf(var.ub):
                out.append(f" PL BND {var.name}")
            else:
                out.append(f" UI BND {var.name} {_num(var.ub)}")
        else:
            lb_inf = math.isinf(var.lb)
            ub_inf = math.isinf(var.ub)
            if lb_inf and ub_inf:
                out.append(f" FR BND {var.name}")
                continue
            if lb_inf:
                out.append(f" MI BND {var.name}")
            else:
                out.append(f" LO BND {var.name} {_num(var.lb)}")
            if not ub_inf:
                out.append(f" UP BND {var.name} {_num(var.ub)}")
    out.append("ENDATA")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text


def read_solution(
    source: Union[str, TextIO],
    model: Optional[MilpModel] = None,
) -> MilpSolution:
    """Parse a "name value" solution file.

    With a model, unknown variable names are an error and undeclared
    variables default to 0.0, so the result is directly checkable with
    validate_solution.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()

    known = {v.name for v in model.variables} if model is not None else None
    values: dict[str, float] = {}
    objective: Optional[float] = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "=obj=":
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: malformed objective line {line!r}")
            objective = float(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'name value', got {line!r}")
        name, text = parts
        if known is not None and name not in known:
            raise ValueError(f"line {lineno}: unknown variable {name}")
        try:
            values[name] = float(text)
        except ValueError:
            raise ValueError(f"line {lineno}: bad number {text!r} for {name}") from None
    if known is not None:
        for name in known:
            values.setdefault(name, 0.0)
    return MilpSolution(values=values, objective=objective, status="imported")
