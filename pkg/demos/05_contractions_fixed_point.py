"""Contraction constants, the fundamental inequalities and fixed-point iteration.

    python3 demos/05_contractions_fixed_point.py
"""

from modmetric import (ContractionParams, SamplingPlan, SelfMap, build_euclidean, builtin_modular,
                       check_fund1, check_fund2, check_palais, estimate_min_k, solve,
                       verify_contraction, verify_theorem_conditions)

line = build_euclidean(1)
speed = builtin_modular(line, "average_speed")
step = builtin_modular(line, "step")
plan = SamplingPlan(seed=5, n_samples=1000)
half = SelfMap(lambda x: x / 2, line, "halving")

print("x -> x/2 under w = d/lam")
print("   smallest plain k :", round(estimate_min_k(speed, half, 1.0, "plain", plan), 4))
print("   smallest strong k:", round(estimate_min_k(speed, half, 1.0, "strong", plan), 4))
print("   ", verify_contraction(speed, half, ContractionParams(0.4), plan).summary(), "(k = 0.4)")
print("   identity map     :", estimate_min_k(speed, SelfMap(lambda x: x, line), 1.0, "plain", plan))

print("\nFundamental inequalities bound distances by displacements:")
for rep in (check_fund1(speed, half, 0.5, plan), check_fund2(speed, half, 0.75, plan),
            check_palais(line, half, 0.5, plan)):
    print("   ", rep.summary())

print("\nTheorem hypotheses:")
for w in (speed, step):
    rep = verify_theorem_conditions(w, half, plan.lambda_grid, plan)
    print(f"    {w.name}: existence condition {rep.details['condition']}")

print("\nIterating from x0 = 1 with lam* = 1, tol = 1e-8:")
r = solve(speed, half, 1.0, 1.0, 1e-8)
print(f"    {r.stop_reason} after {r.n_iters} steps at x = {r.approx_fixed_point:.3e}")
r = solve(speed, SelfMap(lambda x: x + 1, line, "shift"), 0.0, 1.0, 1e-8, max_iter=50)
print(f"    x -> x+1: {r.stop_reason}, residuals stay at {sorted({float(v) for v in r.residual_trace})}")
