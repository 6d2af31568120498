"""Modular convergence of sequences, judged on finite data.

    python3 demos/04_convergence.py
"""

from modmetric import (SequenceSpec, build_euclidean, builtin_modular, check_prop3,
                       default_lambda_grid, is_w_cauchy, is_w_convergent)

line = build_euclidean(1)
w = builtin_modular(line, "average_speed")
grid = default_lambda_grid()

seqs = {
    "1/n": SequenceSpec(lambda n: 1.0 / n, 1000, "harmonic"),
    "n": SequenceSpec(lambda n: float(n), 200, "linear"),
    "0,1,0,1,...": SequenceSpec(lambda n: float(n % 2), 400, "alternating"),
}

print("w = d/lam; a verdict needs one scale at which the tail falls below 1e-2.\n")
for name, seq in seqs.items():
    conv = is_w_convergent(w, seq, 0.0, grid, 1e-2)
    cauchy = is_w_cauchy(w, seq, grid, 1e-2)
    print(f"{name:>12}: convergent to 0: {conv.converged!s:5} (scale {conv.witness_lambda}), "
          f"Cauchy: {cauchy.converged!s:5} (scale {cauchy.witness_lambda})")

print("\nConvergence in d_w* against modular convergence at every scale in (0.5, 1, 2, 10):")
for name, seq in seqs.items():
    rep = check_prop3(w, seq, 0.0, (0.5, 1.0, 2.0, 10.0))
    print(f"{name:>12}: metric {rep.details['metric_converges']!s:5} "
          f"modular {rep.details['modular_converges_every_lambda']!s:5} -> {rep.status}")
