"""End-to-end acceptance checks.

Each test exercises one headline property of the package on randomized or
constructed inputs, with explicit tolerances and wall-clock budgets. The
randomized tests use fixed seeds so failures reproduce exactly.
"""

import dataclasses
import random
import time

import bellsched as bs
from bellsched.engine.oracle import enumerate_all
from bellsched.instance import Instance, Route, School, TimeGrid
from bellsched.milp import solution_from_schedule, validate_solution
from bellsched.mps import export_mps

from conftest import random_small, random_tiny, random_schedule

TOL = 1e-9


def _matrix(inst, flip):
    if flip:
        return bs.scenario4_matrix(inst)
    return bs.abs_deviation_matrix(inst, unit="minutes")


# ---------------------------------------------------------------------------
# 1. Exhaustive-search equivalence on 200 tiny instances, all four objectives
# ---------------------------------------------------------------------------

def test_01_engine_matches_exhaustive_search_on_200_tiny_instances():
    t0 = time.monotonic()
    rng = random.Random(12345)
    for i in range(200):
        inst = random_tiny(rng)
        c = _matrix(inst, i % 2)

        base = bs.solve_base(inst)
        assert base.status == "optimal", (i, base.status)
        z_star = base.objective_value
        truth = enumerate_all(inst, c=c, z_bar=z_star)
        assert truth.min_peak == z_star, (i, truth.min_peak, z_star)

        mmx = bs.solve_minimax(inst, c, z_star)
        assert mmx.status == "optimal", (i, mmx.status)
        assert abs(mmx.objective_value - truth.pi_max) <= TOL, (
            i, mmx.objective_value, truth.pi_max)

        lex = bs.solve_lexmin(inst, c, z_star)
        assert lex.status == "optimal", (i, lex.status)
        assert len(lex.objective_value) == len(truth.lexmin), i
        for a, b in zip(lex.objective_value, truth.lexmin):
            assert abs(a - b) <= TOL, (i, lex.objective_value, truth.lexmin)

        tot = bs.solve_minsum(inst, c, z_star)
        assert tot.status == "optimal", (i, tot.status)
        assert abs(tot.objective_value - truth.total) <= TOL, (
            i, tot.objective_value, truth.total)
    assert time.monotonic() - t0 < 300


# ---------------------------------------------------------------------------
# 2. Two schools sharing four long routes: a 45-minute stagger halves the
#    fleet from 4 to 2
# ---------------------------------------------------------------------------

def _stagger_instance(s1_allowed):
    grid = TimeGrid(slot_minutes=5, am_slots=20, pm_min=16, pm_max=26,
                    clock_origin=420)
    schools = (
        School(id=1, label="S1", current_start=19, day_length=6,
               allowed_starts=s1_allowed),
        School(id=2, label="S2", current_start=19, day_length=6,
               allowed_starts=(19,)),
    )
    routes = tuple(
        Route(id=rid, school=sid, period="AM", duration_slots=9)
        for rid, sid in ((1, 1), (2, 1), (3, 2), (4, 2))
    )
    inst = Instance(grid=grid, alpha=0, beta=0, lam=0, mu=0,
                    schools=schools, routes=routes)
    assert not bs.validate_instance(inst)
    return inst


def test_02_offset_starts_halve_the_fleet():
    t0 = time.monotonic()
    common = bs.solve_base(_stagger_instance((19,)))
    assert common.status == "optimal"
    assert common.objective_value == 4

    staggered = bs.solve_base(_stagger_instance((10, 19)))
    assert staggered.status == "optimal"
    assert staggered.objective_value == 2
    assert time.monotonic() - t0 < 1.0


# ---------------------------------------------------------------------------
# 3. Fleet size equals the occupancy peak on 1000 random schedules, with a
#    conflict-free bus assignment as witness
# ---------------------------------------------------------------------------

def test_03_assignment_attains_peak_without_overlap_on_1000_schedules():
    t0 = time.monotonic()
    rng = random.Random(31337)
    checked = 0
    while checked < 1000:
        inst = random_tiny(rng)
        for _ in range(4):
            sched = random_schedule(inst, rng)
            prof = bs.occupancy(inst, sched)
            asg = bs.assign_buses(inst, sched)
            assert asg.fleet_size == prof.peak == bs.min_buses(inst, sched)
            spans = {}
            for rid, sid, period, lo, hi, bus in asg.rows:
                assert lo <= hi
                spans.setdefault((period, bus), []).append((lo, hi))
            for intervals in spans.values():
                intervals.sort()
                for (_, h1), (l2, _) in zip(intervals, intervals[1:]):
                    assert l2 > h1, (inst, sched, asg.rows)
            checked += 1
    assert time.monotonic() - t0 < 60


# ---------------------------------------------------------------------------
# 4. Relaxing the fleet never hurts the worst school, and the rank-by-rank
#    minimum is componentwise at least as good as any worst-case-optimal
#    profile at the same fleet
# ---------------------------------------------------------------------------

def test_04_worst_case_monotone_and_rank_vector_dominates():
    t0 = time.monotonic()
    rng = random.Random(777)
    for i in range(50):
        inst = random_small(rng)
        c = bs.abs_deviation_matrix(inst, unit="minutes")
        base = bs.solve_base(inst)
        assert base.status == "optimal"
        z_star = base.objective_value

        prev = float("inf")
        for z_bar in range(z_star, z_star + 4):
            mmx = bs.solve_minimax(inst, c, z_bar)
            assert mmx.status == "optimal", (i, z_bar, mmx.status)
            assert mmx.objective_value <= prev + TOL, (i, z_bar)
            prev = mmx.objective_value

            lex = bs.solve_lexmin(inst, c, z_bar)
            assert lex.status == "optimal", (i, z_bar, lex.status)
            psi = lex.objective_value
            witness = sorted(
                bs.evaluate(inst, mmx.schedule, c).pi.values(), reverse=True)
            assert abs(psi[0] - mmx.objective_value) <= TOL, (i, z_bar)
            for a, b in zip(psi, witness):
                assert a <= b + TOL, (i, z_bar, psi, witness)
    assert time.monotonic() - t0 < 600


# ---------------------------------------------------------------------------
# 5. At scale, with a 60-second cap per solve, the three repair objectives
#    order as expected: total-minimizing moves least on average, the
#    rank-by-rank vector never averages above the plain worst-case objective,
#    and it spreads changes no wider
# ---------------------------------------------------------------------------

def _reduced_mixed_instances():
    spec = bs.GeneratorSpec("III", schools=6, am_routes=20)
    return [bs.generate_instance(spec, seed=k) for k in range(10)]


def test_05_objective_ordering_on_reduced_mixed_instances():
    avg = {"minsum": [], "lexmin": [], "minimax": []}
    std = {"lexmin": [], "minimax": []}
    for inst in _reduced_mixed_instances():
        c = bs.abs_deviation_matrix(inst, unit="minutes")
        base = bs.solve_base(inst, time_limit=60)
        assert base.schedule is not None
        z_bar = base.objective_value

        mmx = bs.solve_minimax(inst, c, z_bar, time_limit=60)
        lex = bs.solve_lexmin(inst, c, z_bar, per_step_time_limit=10)
        tot = bs.solve_minsum(inst, c, z_bar, time_limit=60)
        for rep in (mmx, lex, tot):
            assert rep.schedule is not None and rep.equity is not None

        avg["minimax"].append(mmx.equity.avg_abs_change_minutes)
        avg["lexmin"].append(lex.equity.avg_abs_change_minutes)
        avg["minsum"].append(tot.equity.avg_abs_change_minutes)
        std["minimax"].append(mmx.equity.std_abs_change_minutes)
        std["lexmin"].append(lex.equity.std_abs_change_minutes)

    def mean(xs):
        return sum(xs) / len(xs)

    assert mean(avg["minsum"]) <= mean(avg["lexmin"]), (avg["minsum"], avg["lexmin"])
    assert mean(avg["lexmin"]) <= mean(avg["minimax"]), (avg["lexmin"], avg["minimax"])
    assert mean(std["lexmin"]) <= mean(std["minimax"]), (std["lexmin"], std["minimax"])


# ---------------------------------------------------------------------------
# 6. Bounding every school's move by tau: the fleet is nonincreasing in tau,
#    matches the unrestricted optimum once tau covers the whole window, and
#    the efficiency premium is largest at tau = 0
# ---------------------------------------------------------------------------

def test_06_bounded_change_sweep_is_monotone_with_vanishing_premium():
    t0 = time.monotonic()
    taus = (0, 15, 30, 45)
    for inst in _reduced_mixed_instances():
        pinned = dataclasses.replace(
            inst,
            schools=tuple(
                dataclasses.replace(s, current_start=11) for s in inst.schools
            ),
        )
        assert not bs.validate_instance(pinned)

        f = {}
        prev_sched = None
        for tau in taus:
            rep = bs.solve_fair_tau(
                pinned, tau, time_limit=12, seed_schedule=prev_sched)
            assert rep.schedule is not None, (inst, tau, rep.status)
            f[tau] = rep.objective_value
            prev_sched = rep.schedule

        for a, b in zip(taus, taus[1:]):
            assert f[b] <= f[a], f
        z_star = f[taus[-1]]
        pof = {tau: bs.price_of_fairness(f[tau], z_star) for tau in taus}
        assert pof[taus[-1]] == 0.0
        assert pof[0] >= pof[taus[-1]], pof
    assert time.monotonic() - t0 < 600


# ---------------------------------------------------------------------------
# 7. Square-root growth of the early-start penalty at 1, 2, and 4 slots
# ---------------------------------------------------------------------------

def test_07_early_start_penalty_values():
    inst = _reduced_mixed_instances()[0]
    school = next(s for s in inst.schools if s.current_start == 11)
    c = bs.scenario4_matrix(inst)
    expected = {
        1: 1.0,
        2: 2.378414230005442,
        4: 5.656854249492381,
    }
    for back, want in expected.items():
        got = c.value(school.id, school.current_start - back)
        assert abs(got - want) <= TOL, (back, got, want)


# ---------------------------------------------------------------------------
# 8. The single-model rank formulation on ten schools needs a 10^9
#    coefficient spread and says so
# ---------------------------------------------------------------------------

def test_08_single_model_rank_weights_flagged_hazardous():
    spec = bs.GeneratorSpec("I", schools=10, am_routes=10)
    inst = bs.generate_instance(spec, seed=0)
    c = bs.scenario4_matrix(inst)
    model = bs.build_lexmin_full(inst, c, z_star=8, pimax_star=10.0,
                                 epsilon=0.1)
    assert model.metadata["coefficient_ratio"] >= 1e9
    assert model.metadata["hazardous"] is True


# ---------------------------------------------------------------------------
# 9. Every engine schedule re-validates in every formulation's variables,
#    and MPS text is byte-identical across repeated exports
# ---------------------------------------------------------------------------

def test_09_schedules_revalidate_and_mps_is_deterministic():
    t0 = time.monotonic()
    rng = random.Random(4242)
    for i in range(12):
        inst = random_tiny(rng)
        c = _matrix(inst, i % 2)
        base = bs.solve_base(inst)
        z_star = base.objective_value
        mmx = bs.solve_minimax(inst, c, z_star)
        lex = bs.solve_lexmin(inst, c, z_star)
        psi = lex.objective_value

        cases = [
            (bs.build_base(inst), base.schedule, None),
            (bs.build_minimax_eps(inst, c, z_star), mmx.schedule, c),
            (bs.build_minimax_weighted(inst, c, 0.5), mmx.schedule, c),
            (bs.build_lexmin_full(inst, c, z_star, mmx.objective_value),
             lex.schedule, c),
        ]
        if len(inst.schools) >= 2:
            cases.append((
                bs.build_lexmin_step(inst, c, z_star, psi[0], j_star=2),
                lex.schedule, c,
            ))
        for model, sched, matrix in cases:
            sol = solution_from_schedule(inst, model, sched, matrix)
            violations = validate_solution(model, sol)
            assert violations == [], (i, model.name, violations)

        for model, _, _ in cases[:2]:
            text = export_mps(model)
            again = export_mps(model)
            assert text == again
        rebuilt = export_mps(bs.build_base(inst))
        assert rebuilt == export_mps(bs.build_base(inst))
    assert time.monotonic() - t0 < 60


# ---------------------------------------------------------------------------
# 10. Full-size mixed-fleet instance: all formulations build, and the engine
#     produces an incumbent plus a lower bound inside ten minutes
# ---------------------------------------------------------------------------

def test_10_full_scale_incumbent_and_bound_within_budget():
    t0 = time.monotonic()
    inst = bs.generate_instance(bs.GeneratorSpec("I"), seed=1)
    assert len(inst.schools) == 15
    assert len(inst.am_routes()) == 59 and len(inst.pm_routes()) == 59

    rep = bs.solve_base(inst, time_limit=180)
    assert rep.schedule is not None
    assert rep.lower_bound is not None
    assert rep.lower_bound <= rep.objective_value

    c = bs.scenario4_matrix(inst)
    z_bar = rep.objective_value
    pimax = bs.evaluate(inst, rep.schedule, c).pi_max
    models = [
        bs.build_base(inst),
        bs.build_minimax_weighted(inst, c, 0.5),
        bs.build_minimax_eps(inst, c, z_bar),
        bs.build_lexmin_full(inst, c, z_bar, pimax),
        bs.build_lexmin_step(inst, c, z_bar, pimax, j_star=2),
    ]
    for model in models:
        assert model.variables and model.constraints

    sol = solution_from_schedule(inst, models[0], rep.schedule)
    assert validate_solution(models[0], sol) == []
    assert time.monotonic() - t0 < 600
