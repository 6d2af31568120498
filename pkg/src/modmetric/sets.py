"""Modular sets, partitions and modular convergence of sequences.

Quantifiers over ``lam`` (exists, for every, ``lam -> inf``) are replaced
by finite grids, so every negative verdict here means "not seen on the
grid", and reports say which grid was used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

from .metrics import BisectionConfig, d_w_star
from .modular import Modular, PreconditionError, _draw_samples
from .reports import CheckReport, Witness
from .sampling import SamplingPlan

__all__ = [
    "DEFAULT_SCHEDULE",
    "DEFAULT_ZERO_TOL",
    "SequenceSpec",
    "ConvergenceVerdict",
    "PartitionError",
    "member_star",
    "member_zero",
    "partition_star",
    "check_prop2",
    "is_w_convergent",
    "is_w_cauchy",
    "check_prop3",
    "falls_below",
]

DEFAULT_SCHEDULE = tuple(10.0 ** k for k in range(1, 9))
DEFAULT_ZERO_TOL = 1e-3


class PartitionError(RuntimeError):
    """The sampled modular-set relation is not an equivalence on the grid."""


@dataclass(frozen=True)
class SequenceSpec:
    """Points ``generator(n)`` for ``n = 1..length``."""

    generator: Callable[[int], Any]
    length: int
    name: str = "sequence"

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("sequence length must be at least 1")

    def terms(self, space=None) -> list:
        pts = [self.generator(n) for n in range(1, self.length + 1)]
        if space is not None:
            for n, p in enumerate(pts, 1):
                if not space.contains(p):
                    raise ValueError(f"term {n} ({p!r}) is outside the carrier")
        return pts


@dataclass
class ConvergenceVerdict:
    converged: bool
    witness_lambda: float | None = None
    residual_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "witness_lambda": self.witness_lambda,
            "trace": [[n, v] for n, v in self.residual_trace],
        }


def member_star(w: Modular, x0, x, grid) -> bool:
    """``x`` is in the modular set of ``x0``: some grid scale gives a finite value."""
    if not grid:
        raise ValueError("grid must be nonempty")
    return any(w(lam, x, x0).is_finite for lam in grid)


def member_zero(w: Modular, x0, x, schedule=DEFAULT_SCHEDULE, tol: float = DEFAULT_ZERO_TOL) -> bool:
    """``w_lam(x, x0) -> 0`` as ``lam`` grows: the last three schedule values are at most ``tol``."""
    sched = [float(v) for v in schedule]
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be increasing")
    tail = sched[-3:]
    return all(w(lam, x, x0) <= tol for lam in tail)


def partition_star(w: Modular, space, grid, verify: bool = True) -> list[list]:
    """Classes of ``x ~ y`` iff ``member_star(w, x, y)`` on a finite carrier.

    Points are assigned by comparison with one representative per class.
    With ``verify`` every pair is then re-checked against the class
    assignment, so a relation that is not symmetric or not transitive on
    this grid raises :class:`PartitionError`.
    """
    pts = space.points
    if pts is None:
        raise ValueError("partition_star needs an enumerable carrier")
    reps: list = []
    classes: list[list] = []
    label = {}
    for p in pts:
        hit = next((k for k, r in enumerate(reps) if member_star(w, r, p, grid)), None)
        if hit is None:
            reps.append(p)
            classes.append([p])
            label[p] = len(classes) - 1
        else:
            classes[hit].append(p)
            label[p] = hit
    if verify:
        for i, a in enumerate(pts):
            for b in pts[i + 1:]:
                fwd, back = member_star(w, a, b, grid), member_star(w, b, a, grid)
                if fwd != back:
                    raise PartitionError(f"relation is not symmetric between {a!r} and {b!r}")
                if fwd != (label[a] == label[b]):
                    raise PartitionError(
                        f"relation is not transitive: {a!r} and {b!r} "
                        f"{'are' if fwd else 'are not'} related but were placed "
                        f"{'apart' if fwd else 'together'}")
    return classes


def check_prop2(w: Modular, space, plan: SamplingPlan | None = None, schedule=DEFAULT_SCHEDULE,
                tol: float = DEFAULT_ZERO_TOL, require_convex: bool = True) -> CheckReport:
    """Compare the two modular-set memberships on sampled pairs.

    For convex modulars they coincide.  ``require_convex=False`` runs the
    comparison on any modular, for contrast.
    """
    if require_convex and not w.claimed_convex:
        raise PreconditionError("the two modular sets coincide only for convex modulars")
    plan = plan or SamplingPlan()
    report = CheckReport("modular_sets_agree")
    for s in _draw_samples(space, plan):
        x0, x = s["x"], s["y"]
        star = member_star(w, x0, x, plan.lambda_grid)
        zero = member_zero(w, x0, x, schedule, tol)
        report.samples_tested += 1
        ok = star == zero
        report.record(ok, 0.0 if ok else 1.0,
                      Witness({"index": s["index"], "x0": x0, "x": x, "check": "star == zero"},
                              star, zero, 0.0 if ok else 1.0, "eq"))
    report.details = {"modular": w.name, "schedule": list(schedule), "tol": tol}
    return report


def _quarter(n: int) -> int:
    return math.ceil(n / 4)


def falls_below(values, tol: float) -> bool:
    """The last quarter stays within ``tol`` and has come down from the first quarter.

    The second condition rejects sequences whose residuals merely sit at a
    small constant (or oscillate) below ``tol``.
    """
    vals = [float(v) for v in values]
    q = _quarter(len(vals))
    tail_max = max(vals[-q:])
    head_max = max(vals[:q])
    return tail_max <= tol and (tail_max == 0.0 or tail_max < head_max)


def is_w_convergent(w: Modular, seq: SequenceSpec, limit, grid, tol: float) -> ConvergenceVerdict:
    """Search the grid (ascending) for a scale at which ``w_lam(x_n, limit)`` falls below ``tol``."""
    terms = seq.terms(w.space)
    trace: list = []
    for lam in grid:
        res = [w(lam, x, limit) for x in terms]
        trace = [(n, r) for n, r in enumerate(res, 1)]
        if falls_below(res, tol):
            return ConvergenceVerdict(True, float(lam), trace)
    return ConvergenceVerdict(False, None, trace)


def _tail_pairs_max(w, lam, pts):
    """Per index ``n`` in the window, ``max_m w_lam(x_m, x_n)`` over later window terms."""
    out = []
    for i, xn in enumerate(pts):
        best = 0.0
        for xm in pts[i + 1:]:
            v = float(w(lam, xm, xn))
            if v > best:
                best = v
                if math.isinf(v):
                    break
        out.append(best)
    return out


def is_w_cauchy(w: Modular, seq: SequenceSpec, grid, tol: float) -> ConvergenceVerdict:
    """Search for a scale at which all pairs among the last quarter of terms are within ``tol``.

    The first quarter is scored the same way; the tail must improve on it
    (see :func:`falls_below`).
    """
    terms = seq.terms(w.space)
    q = _quarter(len(terms))
    head, tail = terms[:q], terms[-q:]
    first_tail = len(terms) - q + 1
    trace: list = []
    for lam in grid:
        tail_vals = _tail_pairs_max(w, lam, tail)
        trace = [(first_tail + i, v) for i, v in enumerate(tail_vals)]
        tail_max = max(tail_vals)
        if tail_max > tol:
            continue
        head_max = max(_tail_pairs_max(w, lam, head))
        if tail_max == 0.0 or tail_max < head_max:
            return ConvergenceVerdict(True, float(lam), trace)
    return ConvergenceVerdict(False, None, trace)


def check_prop3(w: Modular, seq: SequenceSpec, limit, grid, cfg: BisectionConfig | None = None,
                tol: float = 1e-2) -> CheckReport:
    """Metric convergence in ``d_w_star`` against modular convergence at every grid scale.

    For convex modulars the two notions agree; a disagreement is reported
    with both verdicts and their traces.  Use a grid of moderate scales: at
    very small ``lam`` a finite sequence cannot show ``w_lam -> 0``.
    """
    if not w.claimed_convex:
        raise PreconditionError("the metric/modular convergence comparison needs a convex modular")
    cfg = cfg or BisectionConfig()
    terms = seq.terms(w.space)
    dist = [float(d_w_star(w, x, limit, cfg)) for x in terms]
    metric_verdict = falls_below(dist, tol)
    per_lambda = {}
    for lam in grid:
        per_lambda[float(lam)] = falls_below([w(lam, x, limit) for x in terms], tol)
    modular_verdict = all(per_lambda.values())

    report = CheckReport("metric_vs_modular_convergence")
    report.samples_tested = 1
    ok = metric_verdict == modular_verdict
    report.record(ok, 0.0 if ok else 1.0,
                  Witness({"sequence": seq.name, "limit": limit, "check": "metric == modular"},
                          metric_verdict, modular_verdict, 0.0 if ok else 1.0, "eq"))
    report.details = {
        "modular": w.name,
        "metric_converges": metric_verdict,
        "modular_converges_every_lambda": modular_verdict,
        "per_lambda": [[lam, v] for lam, v in per_lambda.items()],
        "d_w_star_tail": dist[-_quarter(len(dist)):][-5:],
        "tol": tol,
    }
    return report
