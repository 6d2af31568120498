import math

import pytest

from modmetric import (
    BisectionConfig,
    PreconditionError,
    SamplingPlan,
    build_finite,
    builtin_modular,
    check_equivalence_claim,
    check_metric_axioms,
    d_w,
    d_w_star,
    induced_distance,
    infimum_of_threshold,
)

TOL = 1e-6
PLAN = SamplingPlan(seed=11, n_samples=1000)


class TestInfimum:
    def test_threshold_at_two(self):
        r = infimum_of_threshold(lambda lam: lam >= 2)
        assert 2 <= r.value.value <= 2 + TOL and not r.at_floor

    def test_always_false(self):
        assert infimum_of_threshold(lambda lam: False).is_inf

    def test_always_true(self):
        r = infimum_of_threshold(lambda lam: True)
        assert r.at_floor and r.value == 1e-9
        assert r.as_distance() == 0.0

    def test_result_satisfies_predicate(self):
        for t in (1e-7, 0.3, 17.0, 3e8):
            r = infimum_of_threshold(lambda lam: lam > t)
            assert r.value.value > t and r.value.value - t <= TOL

    def test_shrinking_tol_never_hurts(self, ex2):
        for d in (0.25, 1.0, 4.0, 100.0):
            errs = []
            for tol in (1e-2, 1e-4, 1e-6, 1e-8):
                v = d_w(ex2, 0.0, d, BisectionConfig(tol=tol)).value
                errs.append(abs(v - math.sqrt(d)))
            assert errs == sorted(errs, reverse=True)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            BisectionConfig(lambda_min=2, lambda_max=1)
        with pytest.raises(ValueError):
            BisectionConfig(tol=0)


class TestClosedForms:
    @pytest.mark.parametrize("d", [0.25, 1.0, 4.0, 100.0, 7.3])
    def test_speed_modular(self, ex2, d):
        # d/lam <= lam  <=>  lam >= sqrt(d);  d/lam <= 1  <=>  lam >= d
        assert abs(d_w(ex2, 0.0, d).value - math.sqrt(d)) <= TOL
        assert abs(d_w_star(ex2, 0.0, d).value - d) <= TOL

    @pytest.mark.parametrize("d", [0.25, 1.0, 3.0, 100.0])
    def test_step_modular(self, ex3, d):
        assert abs(d_w(ex3, 0.0, d).value - d) <= TOL
        assert abs(d_w_star(ex3, 0.0, d).value - d) <= TOL

    def test_distance_modular_d_w_is_d(self, ex1):
        assert abs(d_w(ex1, 0.0, 5.0).value - 5.0) <= TOL

    def test_identity(self, ex2):
        r = induced_distance(ex2, 1.0, 1.0)
        assert r.at_floor and d_w(ex2, 1.0, 1.0) == 0.0
        assert d_w_star(ex2, 1.0, 1.0) == 0.0

    def test_d_w_star_needs_convex(self, ex1):
        with pytest.raises(PreconditionError):
            d_w_star(ex1, 0.0, 1.0)

    def test_across_islands_is_infinite(self):
        space = build_finite([[0, "inf"], ["inf", 0]])
        w = builtin_modular(space, "average_speed")
        r = induced_distance(w, 0, 1)
        assert r.is_inf and "above_ceiling" in r.to_dict()["flags"]

    @pytest.mark.parametrize("kind", ["average_speed", "step", "metric_as_modular"])
    def test_threshold_predicates_monotone(self, line, kind):
        w = builtin_modular(line, kind)
        rng = PLAN.rng()
        grid = PLAN.lambda_grid
        for _ in range(200):
            x, y = line.sample(rng), line.sample(rng)
            for bound in (lambda lam: lam, lambda lam: 1.0):
                flags = [w(lam, x, y) <= bound(lam) for lam in grid]
                first = flags.index(True) if True in flags else len(flags)
                assert all(flags[first:])


class TestAxiomSweeps:
    @pytest.mark.parametrize("kind", ["average_speed", "step"])
    @pytest.mark.parametrize("metric", ["d_w", "d_w_star"])
    def test_zero_violations(self, line, kind, metric):
        w = builtin_modular(line, kind)
        rep = check_metric_axioms(metric, w, line, PLAN)
        assert rep.passed, rep.violations[:1]
        assert rep.samples_tested == 1000

    def test_restricted_to_one_modular_set(self, islands16):
        w = builtin_modular(islands16, "average_speed")
        rep = check_metric_axioms("d_w", w, islands16, SamplingPlan(seed=1, n_samples=300))
        assert rep.passed
        assert rep.skipped.get("different_modular_sets", 0) > 0

    def test_broken_metric_detected(self, line):
        # w = d^2 / lam gives d_w = |x - y|, fine; w = d^2 gives d_w = d^2 which breaks the triangle
        from modmetric import Modular

        w = Modular(lambda lam, x, y: (x - y) ** 2, space=line, claimed_strict=True)
        assert not check_metric_axioms("d_w", w, line, SamplingPlan(n_samples=200)).passed


class TestEquivalenceClaim:
    def test_holds_at_distance_4(self, ex2):
        rep = check_equivalence_claim(ex2, pairs=[(0.0, 4.0)])
        assert rep.passed

    def test_fails_at_distance_quarter(self, ex2):
        rep = check_equivalence_claim(ex2, pairs=[(0.0, 0.25)])
        assert not rep.passed
        (v,) = rep.violations
        assert v.inputs["check"] == "d_w <= d_w_star"
        assert abs(v.lhs.value - 0.5) <= TOL and abs(v.rhs.value - 0.25) <= TOL

    def test_identical_points(self, ex2):
        assert check_equivalence_claim(ex2, pairs=[(1.0, 1.0)]).passed

    def test_sampled_sweep_reports_violations(self, ex2, line):
        rep = check_equivalence_claim(ex2, line, SamplingPlan(n_samples=100))
        assert rep.samples_tested == 100 and rep.violations

    def test_needs_convex(self, ex1):
        with pytest.raises(PreconditionError):
            check_equivalence_claim(ex1, pairs=[(0.0, 1.0)])
