"""The two metrics a modular induces on each modular set.

``d_w(x, y) = inf{lam > 0 : w_lam(x, y) <= lam}`` for any modular, and
``d_w_star(x, y) = inf{lam > 0 : w_lam(x, y) <= 1}`` for convex ones.  Both
threshold predicates are monotone in ``lam`` because ``w`` is
non-increasing in ``lam``, so each infimum is located by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .extreal import INF, ZERO, ExtNonNegReal
from .modular import Modular, PreconditionError, _draw_samples
from .reports import CheckReport, Witness, judge
from .sampling import SamplingPlan

__all__ = [
    "BisectionConfig",
    "Infimum",
    "infimum_of_threshold",
    "induced_distance",
    "d_w",
    "d_w_star",
    "check_metric_axioms",
    "check_equivalence_claim",
    "METRICS",
]

METRICS = ("d_w", "d_w_star")


@dataclass(frozen=True)
class BisectionConfig:
    lambda_min: float = 1e-9
    lambda_max: float = 1e12
    tol: float = 1e-6

    def __post_init__(self):
        if not (0 < self.lambda_min < self.lambda_max):
            raise ValueError("need 0 < lambda_min < lambda_max")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def to_dict(self) -> dict:
        return {"lambda_min": self.lambda_min, "lambda_max": self.lambda_max, "tol": self.tol}


@dataclass(frozen=True)
class Infimum:
    """Result of a threshold search.

    ``at_floor``: the predicate already holds at ``lambda_min`` (the true
    infimum may be smaller, possibly zero).  ``value`` is INF when the
    predicate fails even at ``lambda_max``.
    """

    value: ExtNonNegReal
    at_floor: bool = False
    tol: float = 0.0

    @property
    def is_inf(self) -> bool:
        return self.value.is_inf

    def as_distance(self) -> ExtNonNegReal:
        return ZERO if self.at_floor else self.value

    def to_dict(self) -> dict:
        flags = []
        if self.at_floor:
            flags.append("at_floor")
        if self.value.is_inf:
            flags.append("above_ceiling")
        return {"value": self.value, "flags": flags, "tol": self.tol}


def infimum_of_threshold(predicate: Callable[[float], bool], cfg: BisectionConfig | None = None) -> Infimum:
    """Smallest ``lam`` in the bracket where a false-then-true predicate turns true.

    The right end of the final bracket is returned, so ``predicate`` holds
    at the result and it overshoots the infimum by at most ``cfg.tol``.
    """
    cfg = cfg or BisectionConfig()
    lo, hi = cfg.lambda_min, cfg.lambda_max
    if not predicate(hi):
        return Infimum(INF, tol=cfg.tol)
    if predicate(lo):
        return Infimum(ExtNonNegReal(lo), at_floor=True, tol=cfg.tol)
    while hi - lo > cfg.tol:
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            break
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return Infimum(ExtNonNegReal(hi), tol=cfg.tol)


def induced_distance(w: Modular, x, y, metric: str = "d_w", cfg: BisectionConfig | None = None) -> Infimum:
    """The full threshold search behind :func:`d_w` / :func:`d_w_star`, flags included."""
    if metric == "d_w":
        return infimum_of_threshold(lambda lam: w(lam, x, y) <= lam, cfg)
    if metric == "d_w_star":
        if not w.claimed_convex:
            raise PreconditionError("d_w_star is only defined for convex modulars")
        return infimum_of_threshold(lambda lam: w(lam, x, y) <= 1.0, cfg)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def d_w(w: Modular, x, y, cfg: BisectionConfig | None = None) -> ExtNonNegReal:
    return induced_distance(w, x, y, "d_w", cfg).as_distance()


def d_w_star(w: Modular, x, y, cfg: BisectionConfig | None = None) -> ExtNonNegReal:
    return induced_distance(w, x, y, "d_w_star", cfg).as_distance()


def _same_set(w, a, b, grid) -> bool:
    return any(w(lam, a, b).is_finite for lam in grid)


def check_metric_axioms(metric: str, w: Modular, space, plan: SamplingPlan | None = None,
                        cfg: BisectionConfig | None = None) -> CheckReport:
    """Identity, symmetry and triangle inequality of an induced metric on samples.

    Triples whose points do not share a modular set with ``x`` are skipped
    and counted.  The triangle inequality allows ``3 * cfg.tol`` of bisection
    error.
    """
    plan = plan or SamplingPlan()
    cfg = cfg or BisectionConfig()
    if metric == "d_w_star" and not w.claimed_convex:
        raise PreconditionError("d_w_star is only defined for convex modulars")

    def m(a, b):
        return induced_distance(w, a, b, metric, cfg).as_distance()

    report = CheckReport(f"metric_axioms[{metric}]")
    for s in _draw_samples(space, plan):
        x, y, z = s["x"], s["y"], s["z"]
        if not (_same_set(w, x, y, plan.lambda_grid) and _same_set(w, x, z, plan.lambda_grid)):
            report.skip("different_modular_sets")
            continue
        report.samples_tested += 1
        base = {"index": s["index"], "x": x, "y": y}
        dxy, dyx = m(x, y), m(y, x)

        ok, slack = judge(m(x, x), 0.0, "eq")
        report.record(ok, slack, Witness({**base, "check": "identity"}, m(x, x), 0.0, slack, "eq"))
        if w.claimed_strict and not space.equal(x, y):
            ok, slack = judge(dxy, cfg.tol, "gt")
            report.record(ok, slack, Witness({**base, "check": "separation"}, dxy, cfg.tol, slack, "gt"))
        ok, slack = judge(dxy, dyx, "eq", abs_tol=cfg.tol)
        report.record(ok, slack, Witness({**base, "check": "symmetry"}, dxy, dyx, slack, "eq"))
        dxz, dzy = m(x, z), m(z, y)
        rhs = dxz + dzy
        ok, slack = judge(dxy, rhs, "leq", abs_tol=3 * cfg.tol)
        report.record(ok, slack, Witness({**base, "z": z, "check": "triangle"}, dxy, rhs, slack))
    report.details = {"modular": w.name, "bisection": cfg.to_dict()}
    return report


def check_equivalence_claim(w: Modular, space=None, plan: SamplingPlan | None = None,
                            cfg: BisectionConfig | None = None, pairs=None) -> CheckReport:
    """Test ``d_w <= d_w_star <= 2 d_w`` pair by pair and report every failure.

    The chain is evaluated, never assumed: it fails for ``w = d / lam`` on
    pairs closer than 1.  ``pairs`` overrides sampling with explicit pairs.
    """
    if not w.claimed_convex:
        raise PreconditionError("the equivalence claim concerns convex modulars")
    plan = plan or SamplingPlan()
    cfg = cfg or BisectionConfig()
    if pairs is None:
        pairs = [(s["x"], s["y"]) for s in _draw_samples(space, plan)]

    report = CheckReport("equivalence_claim")
    slack_abs = 3 * cfg.tol
    values = []
    for i, (x, y) in enumerate(pairs):
        if not _same_set(w, x, y, plan.lambda_grid):
            report.skip("different_modular_sets")
            continue
        report.samples_tested += 1
        a = induced_distance(w, x, y, "d_w", cfg)
        b = induced_distance(w, x, y, "d_w_star", cfg)
        dw, dws = a.as_distance(), b.as_distance()
        values.append({"pair": [x, y], "d_w": a, "d_w_star": b})
        base = {"index": i, "x": x, "y": y}
        ok, slack = judge(dw, dws, "leq", abs_tol=slack_abs)
        report.record(ok, slack, Witness({**base, "check": "d_w <= d_w_star"}, dw, dws, slack))
        twice = dw * 2.0
        ok, slack = judge(dws, twice, "leq", abs_tol=slack_abs)
        report.record(ok, slack, Witness({**base, "check": "d_w_star <= 2 d_w"}, dws, twice, slack))
    report.details = {"modular": w.name, "bisection": cfg.to_dict()}
    if len(values) <= 32:
        report.details["values"] = values
    return report
