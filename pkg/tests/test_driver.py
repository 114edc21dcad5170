import dataclasses

import numpy as np
import pytest

from invmip.clock import TickClock
from invmip.cutgen import SubroutineParams
from invmip.driver import (
    OPTIMAL,
    PROVED_INFEASIBLE,
    TIME_LIMIT,
    Limits,
    VariantConfig,
    preset,
    solve_inverse,
    solve_inverse_multi,
)
from invmip.master import MasterConfig
from invmip.problem import CUT_UNBOUNDED_ESCAPE, InverseInstance, Row

from oracles import enumerate_integer_points, inverse_value_by_full_master

ALL_VARIANTS = ("CP", "CP-ES", "CPTR", "CPTR-ES", "CPTR-ES-DR")


class TestPresets:
    def test_cptr_baseline(self):
        cfg = preset("CPTR")
        assert cfg.params.initial_size == 1.0
        assert cfg.params.growth == 2.0
        assert cfg.params.removal_period == 10
        assert cfg.params.inner_limit == 2
        assert cfg.params.early_stop_seconds is None
        assert cfg.params.dim_reduction is None

    def test_cp_is_the_classical_special_case(self):
        cfg = preset("CP")
        assert cfg.params.removal_period == 1
        assert cfg.params.inner_limit == 1
        assert cfg.params.early_stop_seconds is None

    def test_dr_preset_adds_both_enhancements(self):
        cfg = preset("CPTR-ES-DR")
        assert cfg.params.early_stop_seconds == 5.0
        assert cfg.params.dim_reduction.shrink_rate == 0.03
        assert cfg.params.dim_reduction.dim_floor == 0.8
        assert cfg.params.dim_reduction.empty_limit == 10

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            preset("CPTR-XXL")


class TestSinglePoint:
    @pytest.mark.parametrize("name", ALL_VARIANTS)
    def test_reference_cost_already_inverse_feasible(self, ec_instance, name):
        report = solve_inverse(ec_instance, preset(name))
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(0.0, abs=1e-12)
        assert np.array_equal(report.c_star, ec_instance.c0)
        assert report.cuts == 0

    @pytest.mark.parametrize("name", ALL_VARIANTS)
    def test_knapsack_objective_matches_oracle(self, knapsack_instance, name):
        pts = enumerate_integer_points(knapsack_instance.problem)
        expected = inverse_value_by_full_master(
            knapsack_instance.c0, knapsack_instance.x_hat, pts
        )
        assert expected == pytest.approx(1.0)
        report = solve_inverse(knapsack_instance, preset(name))
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(expected, abs=1e-6)

    def test_unique_minimizer_terminates_without_cuts(self, knapsack_problem):
        inst = InverseInstance(knapsack_problem, c0=[1.0, 2.0], x_hat=[2.0, 0.0])
        report = solve_inverse(inst, preset("CPTR"))
        assert report.status == OPTIMAL
        assert report.objective == 0.0
        assert report.cuts == 0
        assert report.subroutine_calls == 1

    def test_rejects_invalid_instance(self, ec_problem):
        bad = InverseInstance(ec_problem, c0=[-1.0, -1.0], x_hat=[1.0, 1.0])
        with pytest.raises(ValueError):
            solve_inverse(bad, preset("CP"))

    def test_master_objective_monotone_and_no_duplicate_cuts(self, octagon_instance):
        report = solve_inverse(octagon_instance, preset("CPTR"))
        assert report.status == OPTIMAL
        objectives = [rec.master_objective for rec in report.log]
        assert all(a <= b + 1e-9 for a, b in zip(objectives, objectives[1:]))
        points = [tuple(rec.point) for rec in report.log]
        assert len(points) == len(set(points))

    def test_time_limit_is_a_status_not_an_error(self, knapsack_instance):
        report = solve_inverse(knapsack_instance, preset("CPTR"), Limits(time_limit=0.0))
        assert report.status == TIME_LIMIT
        assert report.subroutine_calls == 0

    def test_restrictive_cost_constraints_prove_infeasibility(self, knapsack_instance):
        cfg = VariantConfig(
            name="CPTR",
            params=preset("CPTR").params,
            master=MasterConfig(extra_c_constraints=(Row(((0, 1.0),), "<=", -1.0),)),
        )
        report = solve_inverse(knapsack_instance, cfg)
        assert report.status == PROVED_INFEASIBLE


class TestVariantRelations:
    @pytest.mark.parametrize("fixture", ["ec_instance", "knapsack_instance", "octagon_instance"])
    def test_all_variants_reach_the_same_objective(self, fixture, request):
        inst = request.getfixturevalue(fixture)
        objectives = {
            name: solve_inverse(inst, preset(name)).objective for name in ALL_VARIANTS
        }
        baseline = objectives["CP"]
        for name, value in objectives.items():
            assert value == pytest.approx(baseline, abs=1e-6), name

    @pytest.mark.parametrize("fixture", ["ec_instance", "knapsack_instance", "octagon_instance"])
    def test_classical_equals_trust_region_with_unit_periods(self, fixture, request):
        inst = request.getfixturevalue(fixture)
        cp = solve_inverse(inst, preset("CP"), clock=TickClock())
        degenerate = VariantConfig(
            name="CPTR",
            params=dataclasses.replace(preset("CPTR").params, removal_period=1, inner_limit=1),
        )
        tr = solve_inverse(inst, degenerate, clock=TickClock())
        assert cp.objective == tr.objective
        assert cp.iterations == tr.iterations
        assert len(cp.log) == len(tr.log)
        for a, b in zip(cp.log, tr.log):
            assert np.array_equal(a.point, b.point)
            assert a.violation == b.violation
            assert a.region_size == b.region_size
            assert a.master_objective == b.master_objective
            assert a.cutgen_seconds == b.cutgen_seconds
            assert a.master_seconds == b.master_seconds

    def test_octagon_trust_region_cut_parsimony(self, octagon_instance):
        # the hull corner needs at most three nearby points; the classical
        # route may only ever do worse
        tr = solve_inverse(octagon_instance, preset("CPTR"))
        cp = solve_inverse(octagon_instance, preset("CP"))
        assert tr.cuts <= 3
        assert cp.cuts >= tr.cuts


class TestUnboundedHandling:
    def test_escape_cut_appears_and_objective_is_reached(self, unbounded_instance):
        report = solve_inverse(unbounded_instance, preset("CP"))
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(1.0)
        origins = [rec.origin for rec in report.log]
        assert CUT_UNBOUNDED_ESCAPE in origins
        escape = next(rec for rec in report.log if rec.origin == CUT_UNBOUNDED_ESCAPE)
        assert escape.violation > 1e10

    def test_duality_route_never_escapes_after_master_proposals(self, unbounded_instance):
        cfg = VariantConfig(
            name="CP",
            params=preset("CP").params,
            master=MasterConfig(use_duality_constraints=True),
        )
        report = solve_inverse(unbounded_instance, cfg)
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(1.0)
        # only the seed candidate (the reference cost itself) may escape
        for rec in report.log[1:]:
            assert rec.origin != CUT_UNBOUNDED_ESCAPE

    @pytest.mark.parametrize("fixture", ["ec_instance", "knapsack_instance", "octagon_instance"])
    def test_duality_constraints_do_not_change_the_optimum(self, fixture, request):
        inst = request.getfixturevalue(fixture)
        plain = solve_inverse(inst, preset("CPTR"))
        dualized = solve_inverse(
            inst,
            VariantConfig(
                name="CPTR",
                params=preset("CPTR").params,
                master=MasterConfig(use_duality_constraints=True),
            ),
        )
        assert dualized.objective == pytest.approx(plain.objective, abs=1e-6)


class TestMultiPoint:
    def test_duplicated_instances_change_nothing(self, ec_instance):
        report = solve_inverse_multi([ec_instance, ec_instance], None, 1, preset("CPTR"))
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("v_star", [1])
    def test_single_instance_reduces_to_single_point(self, knapsack_instance, v_star):
        single = solve_inverse(knapsack_instance, preset("CPTR"))
        multi = solve_inverse_multi([knapsack_instance], None, v_star, preset("CPTR"))
        assert multi.status == OPTIMAL
        assert multi.objective == pytest.approx(single.objective, abs=1e-9)
        assert multi.cut_counts[0] == single.cuts

    def test_lambda_zero_gives_zero_objective(self, knapsack_instance, knapsack_problem):
        second = InverseInstance(knapsack_problem, c0=[1.0, 2.0], x_hat=[2.0, 0.0])
        report = solve_inverse_multi([knapsack_instance, second], 0.0, 1, preset("CPTR"))
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(report.c_star, knapsack_instance.c0)

    def test_large_lambda_single_instance_matches_single_point(self, knapsack_instance):
        single = solve_inverse(knapsack_instance, preset("CPTR"))
        multi = solve_inverse_multi([knapsack_instance], 2.0, 1, preset("CPTR"))
        assert multi.status == OPTIMAL
        assert multi.objective == pytest.approx(single.objective, abs=1e-6)
        assert multi.c_bars is not None

    def test_sweep_order_insensitive_objective(self, knapsack_instance, knapsack_problem):
        second = InverseInstance(knapsack_problem, c0=[1.0, 2.0], x_hat=[2.0, 0.0])
        depth = solve_inverse_multi([knapsack_instance, second], None, 1, preset("CPTR"))
        breadth = solve_inverse_multi([knapsack_instance, second], None, 2, preset("CPTR"))
        assert depth.status == breadth.status == OPTIMAL
        assert depth.objective == pytest.approx(breadth.objective, abs=1e-6)

    def test_two_pools_match_combined_brute_force(self, knapsack_instance, knapsack_problem):
        second = InverseInstance(knapsack_problem, c0=[1.0, 2.0], x_hat=[2.0, 0.0])
        report = solve_inverse_multi([knapsack_instance, second], None, 1, preset("CPTR"))
        pts = enumerate_integer_points(knapsack_problem)
        diffs = np.vstack([knapsack_instance.x_hat - pts, second.x_hat - pts])
        # reuse the scipy-backed full master with the stacked constraint set
        expected = inverse_value_by_full_master(
            knapsack_instance.c0, np.zeros(2), np.zeros(2) - diffs
        )
        assert report.status == OPTIMAL
        assert report.objective == pytest.approx(expected, abs=1e-6)

    def test_rejects_mismatched_reference_costs(self, knapsack_problem, knapsack_instance):
        other = InverseInstance(knapsack_problem, c0=[0.0, 0.0], x_hat=[2.0, 0.0])
        with pytest.raises(ValueError):
            solve_inverse_multi([knapsack_instance, other], None, 1, preset("CPTR"))
