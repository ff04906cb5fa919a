import io

import pytest

import bellsched as bs
from bellsched.milp import (
    MilpModel,
    MilpSolution,
    Variable,
    build_base,
    build_minimax_eps,
    solution_from_schedule,
    validate_solution,
)
from bellsched.mps import export_mps, read_solution


def test_export_is_byte_deterministic(tmp_path):
    inst = bs.tiny_example()
    model = build_base(inst)
    a = export_mps(model)
    b = export_mps(model)
    assert a == b
    p = tmp_path / "m.mps"
    export_mps(model, p)
    assert p.read_text() == a


def test_export_skeleton():
    inst = bs.tiny_example()
    model = build_base(inst)
    lines = export_mps(model).split("\n")
    assert lines[0] == "NAME base"
    assert "ROWS" in lines
    assert "COLUMNS" in lines
    assert "RHS" in lines
    assert "BOUNDS" in lines
    assert lines[-2] == "ENDATA"
    assert lines[-1] == ""

    rows_at = lines.index("ROWS")
    assert lines[rows_at + 1] == " N obj"
    senses = {ln.strip().split()[0] for ln in lines[rows_at + 2: lines.index("COLUMNS")]}
    assert senses <= {"L", "G", "E"}


def test_integer_runs_are_fenced_by_markers():
    inst = bs.tiny_example()
    model = build_base(inst)
    text = export_mps(model)
    assert text.count("'INTORG'") == text.count("'INTEND'")
    assert text.count("'INTORG'") >= 1
    # binary x/u/v block and the integer z must all sit inside markers
    inside = False
    flagged = set()
    for ln in text.split("\n"):
        if "'INTORG'" in ln:
            inside = True
            continue
        if "'INTEND'" in ln:
            inside = False
            continue
        parts = ln.split()
        if len(parts) == 3 and parts[1] != "obj" and not ln.startswith(("NAME", " N", " L", " G", " E")):
            if parts[0] in model.variable_map():
                flagged.add((parts[0], inside))
    kinds = model.variable_map()
    for name, inside in flagged:
        assert (kinds[name].kind in ("binary", "integer")) == inside, name


def test_bounds_section_covers_kinds():
    inst = bs.tiny_example()
    restricted = inst.restrict_starts({1: (3, 4)})
    model = build_minimax_eps(restricted, bs.abs_deviation_matrix(restricted), 1)
    text = export_mps(model)
    assert " BV BND " in text  # free binaries
    assert " FX BND " in text  # pinned u variables
    assert " LI BND " in text and " PL BND " in text  # unbounded integer z
    assert " LO BND " in text and " UP BND " in text  # boxed continuous pi


def test_rhs_only_lists_nonzero():
    inst = bs.tiny_example()
    model = build_base(inst)
    text = export_mps(model)
    rhs_lines = [
        ln for ln in text.split("\n")[text.split("\n").index("RHS") + 1:]
        if ln.startswith("    RHS")
    ]
    for ln in rhs_lines:
        assert float(ln.split()[2]) != 0.0
    # one_start rows carry rhs 1
    assert any("one_start" in ln for ln in rhs_lines)


def test_number_rendering_is_compact():
    model = MilpModel(
        name="numbers",
        variables=(Variable("a", "continuous", lb=0.0, ub=10.0),),
        constraints=(),
        objective=(("a", 0.01),),
        metadata={},
    )
    text = export_mps(model)
    assert " a obj 0.01" in text.replace("    ", " ")


def test_export_rejects_unknown_variable_reference():
    model = MilpModel(
        name="broken",
        variables=(Variable("a", "continuous"),),
        constraints=(),
        objective=(("ghost", 1.0),),
        metadata={},
    )
    with pytest.raises(ValueError, match="ghost"):
        export_mps(model)


# ---------------------------------------------------------------------------
# Solution file ingestion
# ---------------------------------------------------------------------------

def test_solution_file_round_trip(tmp_path):
    inst = bs.tiny_example()
    c = bs.abs_deviation_matrix(inst)
    model = build_minimax_eps(inst, c, 1)
    sched = bs.solve_minimax(inst, c, 1).schedule
    sol = solution_from_schedule(inst, model, sched, c)

    p = tmp_path / "sol.txt"
    with open(p, "w") as fh:
        fh.write("# external solver output\n")
        fh.write(f"=obj= {sol.objective!r}\n")
        for name, val in sorted(sol.values.items()):
            if val:
                fh.write(f"{name} {val!r}\n")

    back = read_solution(p, model)
    assert back.status == "imported"
    assert back.objective == sol.objective
    assert validate_solution(model, back) == []


def test_read_solution_defaults_missing_to_zero():
    model = MilpModel(
        name="m",
        variables=(Variable("a", "continuous"), Variable("b", "continuous")),
        constraints=(),
        objective=(("a", 1.0),),
        metadata={},
    )
    sol = read_solution(io.StringIO("a 1.5\n"), model)
    assert sol.values["a"] == 1.5
    assert sol.values["b"] == 0.0


def test_read_solution_rejects_unknown_names_and_garbage():
    model = MilpModel(
        name="m",
        variables=(Variable("a", "continuous"),),
        constraints=(),
        objective=(),
        metadata={},
    )
    with pytest.raises(ValueError, match="unknown variable ghost"):
        read_solution(io.StringIO("ghost 1\n"), model)
    with pytest.raises(ValueError, match="line 1"):
        read_solution(io.StringIO("justonetoken\n"), model)
    with pytest.raises(ValueError):
        read_solution(io.StringIO("a notanumber\n"), model)


def test_read_solution_without_model_accepts_anything():
    sol = read_solution(io.StringIO("whatever 2.0\n=obj= 7\n"))
    assert sol.values == {"whatever": 2.0}
    assert sol.objective == 7.0
