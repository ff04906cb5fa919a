"""Joint bell-time and bus-fleet optimization.

Pick start times for a district's schools, and arrival/departure slots for
every bus route, so the whole district runs on as few buses as possible;
then spend any slack fairly, bounding or lexicographically minimizing how
much each school's start has to move.
"""

from .engine import (
    KERNEL_TAG,
    SolveReport,
    feasible_with,
    lower_bound,
    solve_base,
    solve_fair_tau,
    solve_lexmin,
    solve_minimax,
    solve_minimax_weighted,
    solve_minsum,
    start_domains,
    tiny_example,
)
from .engine.oracle import OracleResult, SearchSpaceError, brute_force_oracle
from .equity import (
    DisutilityMatrix,
    EquityReport,
    abs_deviation_matrix,
    custom_matrix,
    evaluate,
    price_of_fairness,
    scenario4_matrix,
)
from .fleet import BusAssignment, OccupancyProfile, assign_buses, min_buses, occupancy
from .instance import (
    GeneratorSpec,
    Instance,
    Route,
    School,
    TimeGrid,
    generate_instance,
    load_instance,
    save_instance,
    slot_clock,
    validate_instance,
)
from .milp import (
    Constraint,
    MilpModel,
    MilpSolution,
    Variable,
    build_base,
    build_lexmin_full,
    build_lexmin_step,
    build_minimax_eps,
    build_minimax_weighted,
    solution_from_schedule,
    validate_solution,
)
from .mps import export_mps, read_solution
from .schedule import Schedule, check_schedule_shape, schedule_from_dict, schedule_to_dict

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_TAG",
    "SolveReport",
    "feasible_with",
    "lower_bound",
    "solve_base",
    "solve_fair_tau",
    "solve_lexmin",
    "solve_minimax",
    "solve_minimax_weighted",
    "solve_minsum",
    "start_domains",
    "tiny_example",
    "OracleResult",
    "SearchSpaceError",
    "brute_force_oracle",
    "DisutilityMatrix",
    "EquityReport",
    "abs_deviation_matrix",
    "custom_matrix",
    "evaluate",
    "price_of_fairness",
    "scenario4_matrix",
    "BusAssignment",
    "OccupancyProfile",
    "assign_buses",
    "min_buses",
    "occupancy",
    "GeneratorSpec",
    "Instance",
    "Route",
    "School",
    "TimeGrid",
    "generate_instance",
    "load_instance",
    "save_instance",
    "slot_clock",
    "validate_instance",
    "Constraint",
    "MilpModel",
    "MilpSolution",
    "Variable",
    "build_base",
    "build_lexmin_full",
    "build_lexmin_step",
    "build_minimax_eps",
    "build_minimax_weighted",
    "solution_from_schedule",
    "validate_solution",
    "export_mps",
    "read_solution",
    "Schedule",
    "check_schedule_shape",
    "schedule_from_dict",
    "schedule_to_dict",
]
