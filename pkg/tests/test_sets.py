import numpy as np
import pytest

from modmetric import (
    PreconditionError,
    SamplingPlan,
    SequenceSpec,
    build_finite,
    builtin_modular,
    check_prop2,
    check_prop3,
    default_lambda_grid,
    is_w_cauchy,
    is_w_convergent,
    load_landmass,
    member_star,
    member_zero,
    partition_star,
)
from modmetric.sets import PartitionError, falls_below

from conftest import random_map, union_find_components

GRID = default_lambda_grid()
PLAN = SamplingPlan(seed=21, n_samples=1000)

harmonic = SequenceSpec(lambda n: 1.0 / n, 1000, "harmonic")
alternating = SequenceSpec(lambda n: 0.0 if n % 2 else 1.0, 1000, "alternating")
linear = SequenceSpec(lambda n: float(n), 200, "linear")
constant = SequenceSpec(lambda n: 3.0, 100, "constant")


class TestMembership:
    def test_star_distance_modular(self, ex1):
        assert member_star(ex1, 0.0, 5.0, GRID)

    def test_star_across_islands(self):
        g = load_landmass("##.##")
        w = builtin_modular(g, "average_speed")
        assert not member_star(w, (0, 0), (0, 4), GRID)
        assert member_star(w, (0, 0), (0, 1), GRID)

    def test_star_self(self, ex3):
        assert member_star(ex3, 2.0, 2.0, GRID)

    def test_zero_distance_modular_constant(self, ex1):
        assert not member_zero(ex1, 0.0, 5.0)

    def test_zero_speed_modular(self, ex2):
        assert member_zero(ex2, 0.0, 5.0)
        assert member_zero(ex2, -10.0, 10.0)

    def test_zero_self(self, ex1):
        assert member_zero(ex1, 1.0, 1.0)

    def test_schedule_must_increase(self, ex2):
        with pytest.raises(ValueError):
            member_zero(ex2, 0.0, 1.0, schedule=(10.0, 1.0))

    @pytest.mark.parametrize("kind", ["metric_as_modular", "average_speed", "step"])
    def test_zero_implies_star(self, line, kind):
        w = builtin_modular(line, kind)
        rng = PLAN.rng()
        for _ in range(300):
            x0, x = line.sample(rng), line.sample(rng)
            if member_zero(w, x0, x):
                assert member_star(w, x0, x, GRID)


class TestPartition:
    def test_islands(self):
        g = load_landmass("##.##")
        classes = partition_star(builtin_modular(g, "average_speed"), g, GRID)
        assert sorted(classes) == [[(0, 0), (0, 1)], [(0, 3), (0, 4)]]

    def test_finite_space_one_class(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(10, 3))
        m = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        s = build_finite(m.tolist())
        assert partition_star(builtin_modular(s, "average_speed"), s, GRID) == [list(range(10))]

    def test_single_point(self):
        s = build_finite([[0]])
        assert partition_star(builtin_modular(s, "step"), s, GRID) == [[0]]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_component_oracle(self, seed):
        rng = np.random.default_rng(seed)
        rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        g = load_landmass(random_map(rng, rows, cols, 0.5))
        classes = partition_star(builtin_modular(g, "average_speed"), g, GRID)
        flat = [p for c in classes for p in c]
        assert len(flat) == len(set(flat)) == len(g.points)
        assert all(classes)
        assert sorted(sorted(c) for c in classes) == union_find_components(g.land)

    def test_non_transitive_relation_detected(self):
        from modmetric import Modular

        s = build_finite([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        w = Modular(lambda lam, x, y: float("inf") if abs(x - y) > 1 else float(abs(x - y)), space=s)
        with pytest.raises(PartitionError):
            partition_star(w, s, GRID)


class TestProp2:
    @pytest.mark.parametrize("kind", ["average_speed", "step"])
    def test_convex_builtins_agree(self, line, kind):
        rep = check_prop2(builtin_modular(line, kind), line, PLAN)
        assert rep.passed and rep.samples_tested == 1000

    def test_distance_modular_contrast(self, line, ex1):
        with pytest.raises(PreconditionError):
            check_prop2(ex1, line, PLAN)
        rep = check_prop2(ex1, line, PLAN, require_convex=False)
        wit = next(v for v in rep.violations if v.inputs["x"] != v.inputs["x0"])
        assert wit.lhs is True and wit.rhs is False

    def test_speed_on_islands(self, islands16):
        assert check_prop2(builtin_modular(islands16, "average_speed"), islands16, PLAN).passed


class TestConvergence:
    def test_falls_below(self):
        assert falls_below([1, 0.5, 0.1, 0.01], 0.05)
        assert not falls_below([0.01, 0.02, 0.01, 0.02], 0.05)
        assert falls_below([0, 0, 0], 1e-9)

    def test_harmonic_converges_at_lambda_one(self, ex2):
        v = is_w_convergent(ex2, harmonic, 0.0, [1.0], 1e-2)
        assert v.converged and v.witness_lambda == 1.0
        # residual is 1/n at lam = 1
        assert [float(r) for _, r in v.residual_trace[:3]] == [1.0, 0.5, 1 / 3]

    def test_constant_at_limit(self, ex2):
        seq = SequenceSpec(lambda n: 0.0, 50)
        v = is_w_convergent(ex2, seq, 0.0, GRID, 1e-6)
        assert v.converged and v.witness_lambda == GRID[0]

    def test_alternating_does_not_converge(self, ex2):
        assert not is_w_convergent(ex2, alternating, 0.0, GRID, 1e-6).converged
        assert not is_w_convergent(ex2, alternating, 0.0, [1.0], 1e-2).converged

    def test_cauchy(self, ex2):
        assert is_w_cauchy(ex2, SequenceSpec(lambda n: 1.0 / n, 200), GRID, 1e-6).converged
        assert is_w_cauchy(ex2, constant, GRID, 1e-6).converged
        assert not is_w_cauchy(ex2, linear, GRID, 1e-6).converged
        assert not is_w_cauchy(ex2, SequenceSpec(alternating.generator, 200), GRID, 1e-6).converged

    def test_verdict_invariant(self, ex2):
        v = is_w_convergent(ex2, harmonic, 0.0, GRID, 1e-6)
        assert v.converged and v.witness_lambda is not None
        q = len(v.residual_trace) // 4
        assert max(float(r) for _, r in v.residual_trace[-q:]) <= 1e-6


class TestProp3:
    MID = [0.5, 1.0, 2.0, 10.0]

    @pytest.mark.parametrize("seq,expected", [(harmonic, True), (alternating, False), (constant, False)])
    def test_agreement(self, ex2, seq, expected):
        limit = 3.0 if seq is constant and expected else 0.0
        rep = check_prop3(ex2, seq, limit, self.MID)
        assert rep.passed
        assert rep.details["metric_converges"] is expected

    def test_constant_at_limit(self, ex2):
        rep = check_prop3(ex2, constant, 3.0, self.MID)
        assert rep.passed and rep.details["metric_converges"]

    def test_needs_convex(self, ex1):
        with pytest.raises(PreconditionError):
            check_prop3(ex1, harmonic, 0.0, self.MID)
