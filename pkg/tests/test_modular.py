import pytest

from modmetric import (
    INF,
    Modular,
    PreconditionError,
    SamplingError,
    SamplingPlan,
    build_finite,
    builtin_modular,
    check_property,
    replay_witness,
    scaled_modular,
)
from modmetric.reports import Witness

PLAN = SamplingPlan(seed=7, n_samples=1000)


class TestEval:
    def test_average_speed(self, ex2):
        assert ex2(2, 3.0, 7.0) == 2.0

    def test_step_far(self, ex3):
        assert ex3(2, 0.0, 3.0) == INF

    @pytest.mark.parametrize("kind", ["metric_as_modular", "average_speed", "step"])
    @pytest.mark.parametrize("lam", [1e-6, 1.0, 1e6])
    def test_identity(self, line, kind, lam):
        assert builtin_modular(line, kind)(lam, 2.5, 2.5) == 0.0

    @pytest.mark.parametrize("lam", [0.0, -1.0, float("nan"), float("inf")])
    def test_rejects_bad_lambda(self, ex2, lam):
        with pytest.raises(ValueError):
            ex2(lam, 0.0, 1.0)

    def test_rejects_points_outside_carrier(self, ex2):
        with pytest.raises(ValueError):
            ex2(1.0, (0.0, 1.0), 0.0)

    def test_deterministic(self, ex2):
        assert ex2(0.3, 1.1, -2.7) == ex2(0.3, 1.1, -2.7)


class TestScaled:
    def test_scaled_distance_matches_speed_formula(self, ex1):
        # d = 2, lam = 4  ->  2 / 4
        assert scaled_modular(ex1)(4.0, 0.0, 2.0) == 0.5

    def test_scaled_speed_modular(self, ex2):
        # (4 / 2) / 2
        assert scaled_modular(ex2)(2.0, 0.0, 4.0) == 1.0

    def test_identity_and_flags(self, ex2):
        v = scaled_modular(ex2)
        assert v(3.0, 1.0, 1.0) == 0.0
        assert v.claimed_strict == ex2.claimed_strict
        assert v.claimed_finite == ex2.claimed_finite

    def test_infinity_stays_infinite(self, ex3):
        assert scaled_modular(ex3)(1.0, 0.0, 5.0) == INF

    @pytest.mark.parametrize("base", ["ex2", "ex3"])
    @pytest.mark.parametrize("prop", ["axiom1", "symmetry", "triangle3"])
    def test_scaled_convex_modular_is_modular(self, request, line, base, prop):
        v = scaled_modular(request.getfixturevalue(base))
        assert check_property(v, line, prop, PLAN).passed


class TestBuiltinProperties:
    @pytest.mark.parametrize("kind", ["metric_as_modular", "average_speed", "step"])
    @pytest.mark.parametrize("prop", ["axiom1", "symmetry", "triangle3", "monotone_lambda"])
    def test_axioms_on_line(self, line, kind, prop):
        rep = check_property(builtin_modular(line, kind), line, prop, PLAN)
        assert rep.samples_tested >= 1000
        assert rep.passed, rep.violations[:1]

    @pytest.mark.parametrize("prop", ["axiom1", "symmetry", "triangle3", "monotone_lambda", "convexity"])
    def test_speed_modular_on_islands(self, islands16, prop):
        w = builtin_modular(islands16, "average_speed")
        assert check_property(w, islands16, prop, PLAN).passed

    @pytest.mark.parametrize("kind", ["average_speed", "step"])
    def test_convex_builtins_pass_convexity(self, line, kind):
        assert check_property(builtin_modular(line, kind), line, "convexity", PLAN).passed

    def test_distance_modular_not_convex_with_z_equal_y_witness(self, ex1, line):
        rep = check_property(ex1, line, "convexity", PLAN)
        assert not rep.passed
        w = next(v for v in rep.violations if v.inputs["z"] == v.inputs["y"]
                 and v.inputs["mu"] == v.inputs["lambda"])
        # lhs = d, rhs = d / 2
        assert w.rhs.value == pytest.approx(w.lhs.value / 2, rel=1e-12)

    def test_distance_convexity_witness_on_two_points(self):
        space = build_finite([[0, 2], [2, 0]])
        w = builtin_modular(space, "metric_as_modular")
        rep = check_property(w, space, "convexity", PLAN)
        hit = next(v for v in rep.violations if v.inputs["x"] != v.inputs["y"] and v.inputs["z"] == v.inputs["y"]
                   and v.inputs["mu"] == v.inputs["lambda"])
        assert hit.lhs == 2.0 and hit.rhs == 1.0

    def test_strictness(self, line, ex2, ex3):
        assert check_property(ex2, line, "strictness", PLAN).passed
        assert not check_property(ex3, line, "strictness", PLAN).passed

    def test_monotone_step_across_threshold(self, ex3):
        assert ex3(2.9, 0.0, 3.0) == INF and ex3(3.1, 0.0, 3.0) == 0.0
        assert ex3(2.9, 0.0, 3.0) >= ex3(3.1, 0.0, 3.0)

    def test_convex_limits(self, line, ex2):
        rep = check_property(ex2, line, "convex_limits", PLAN)
        assert rep.passed and rep.samples_tested > 0

    def test_convex_limits_requires_convex(self, line, ex1):
        with pytest.raises(PreconditionError):
            check_property(ex1, line, "convex_limits", PLAN)

    def test_single_point_carrier_signals(self):
        space = build_finite([[0]])
        w = builtin_modular(space, "average_speed")
        with pytest.raises(SamplingError):
            check_property(w, space, "strictness", PLAN)
        assert check_property(w, space, "axiom1", PLAN).passed


class TestBrokenModulars:
    def test_non_monotone_rule_is_caught(self, line):
        w = Modular(lambda lam, x, y: abs(x - y) * lam, space=line, name="growing")
        rep = check_property(w, line, "monotone_lambda", PLAN)
        assert not rep.passed

    def test_asymmetric_rule_is_caught(self, line):
        w = Modular(lambda lam, x, y: max(x - y, 0.0) + 2 * max(y - x, 0.0), space=line)
        assert not check_property(w, line, "symmetry", PLAN).passed

    def test_identity_failure_is_caught(self, line):
        w = Modular(lambda lam, x, y: 1.0, space=line)
        assert not check_property(w, line, "axiom1", PLAN).passed

    def test_triangle_failure_is_caught(self, line):
        w = Modular(lambda lam, x, y: (x - y) ** 2, space=line)
        assert not check_property(w, line, "triangle3", PLAN).passed


class TestReports:
    def test_replay_reproduces_witnesses(self, ex1, line):
        rep = check_property(ex1, line, "convexity", PLAN)
        for wit in rep.violations[:50]:
            lhs, rhs, ok, slack = replay_witness(ex1, wit, PLAN.slack_tol)
            assert (lhs, rhs, slack) == (wit.lhs, wit.rhs, wit.slack)
            assert not ok

    @pytest.mark.parametrize("prop", ["strictness", "convexity"])
    def test_same_plan_byte_identical(self, ex3, ex1, line, prop):
        w = ex3 if prop == "strictness" else ex1
        a = check_property(w, line, prop, PLAN).to_json()
        b = check_property(w, line, prop, PLAN).to_json()
        assert a == b

    def test_workers_do_not_change_report(self, ex1, line):
        a = check_property(ex1, line, "convexity", PLAN, workers=1).to_json()
        b = check_property(ex1, line, "convexity", PLAN, workers=4).to_json()
        assert a == b

    def test_report_json_shape(self, ex1, line):
        d = check_property(ex1, line, "convexity", SamplingPlan(n_samples=8)).to_dict()
        assert set(d) >= {"property", "samples", "status", "max_slack", "violations"}
        assert set(d["violations"][0]) >= {"inputs", "lhs", "rhs", "slack"}

    def test_status_iff_no_violations(self, ex2, line):
        rep = check_property(ex2, line, "triangle3", SamplingPlan(n_samples=20))
        assert rep.status == "pass" and rep.violations == []
        rep.violations.append(Witness({}, 1.0, 0.0, 1.0))
        assert rep.status == "fail"


class TestPlan:
    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError):
            SamplingPlan(lambda_grid=(2.0, 1.0))

    def test_rejects_nonpositive_grid(self):
        with pytest.raises(ValueError):
            SamplingPlan(lambda_grid=(0.0, 1.0))

    def test_default_grid(self):
        g = SamplingPlan().lambda_grid
        assert len(g) == 33 and g[0] == pytest.approx(1e-6) and g[-1] == pytest.approx(1e6)

    def test_same_seed_same_stream(self):
        a, b = SamplingPlan(seed=3).rng(), SamplingPlan(seed=3).rng()
        assert a.random(5).tobytes() == b.random(5).tobytes()
