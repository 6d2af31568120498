"""Which built-in modulars satisfy which axioms, and what a failure looks like.

    python3 demos/01_axioms.py
"""

from modmetric import PROPERTIES, SamplingPlan, build_euclidean, builtin_modular, check_property

line = build_euclidean(1)
plan = SamplingPlan(seed=7, n_samples=1000)

print("Property sweeps on the real line, 1000 seeded samples each.\n")
for kind in ("metric_as_modular", "average_speed", "step"):
    w = builtin_modular(line, kind)
    print(f"{kind}  (flags: {w.flags()})")
    for prop in PROPERTIES:
        if prop == "convex_limits" and not w.claimed_convex:
            continue
        print("   ", check_property(w, line, prop, plan).summary())
    print()

# The plain distance is a modular but not a convex one.  Taking z = y and
# mu = lam leaves d(x, y) on the left and only half of it on the right.
rep = check_property(builtin_modular(line, "metric_as_modular"), line, "convexity", plan)
v = next(v for v in rep.violations
         if v.inputs["z"] == v.inputs["y"] and v.inputs["mu"] == v.inputs["lambda"])
print("convexity witness for w = d with z = y, mu = lam:")
print("   inputs:", {k: v.inputs[k] for k in ("x", "y", "z", "lambda", "mu")})
print(f"   w_(lam+mu)(x,y) = {v.lhs}  >  weighted sum = {v.rhs}")
