"""The two metrics induced by a modular, and where the textbook chain between them breaks.

    python3 demos/02_induced_metrics.py
"""

import math

from modmetric import build_euclidean, builtin_modular, check_equivalence_claim, d_w, d_w_star

line = build_euclidean(1)
speed = builtin_modular(line, "average_speed")
step = builtin_modular(line, "step")

print("w = d/lam gives d_w = sqrt(d) and d_w* = d; the step modular gives d for both.\n")
print(f"{'d':>8} {'d_w':>12} {'sqrt(d)':>12} {'d_w*':>12} {'step d_w':>12} {'step d_w*':>12}")
for d in (0.01, 0.25, 1.0, 4.0, 100.0):
    print(f"{d:8g} {float(d_w(speed, 0.0, d)):12.6f} {math.sqrt(d):12.6f} "
          f"{float(d_w_star(speed, 0.0, d)):12.6f} {float(d_w(step, 0.0, d)):12.6f} "
          f"{float(d_w_star(step, 0.0, d)):12.6f}")

print("\nIs d_w <= d_w* <= 2 d_w?  Checked pair by pair, never assumed:")
rep = check_equivalence_claim(speed, pairs=[(0.0, d) for d in (0.25, 0.5, 1.0, 2.0, 4.0, 9.0)])
print("   ", rep.summary())
for v in rep.violations:
    print(f"    fails at y = {v.inputs['y']}: {v.inputs['check']} reads {float(v.lhs):.4f} <= {float(v.rhs):.4f}")
print("Below d = 1 the square root exceeds d, so the first link of the chain breaks.")
