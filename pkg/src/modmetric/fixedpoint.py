"""Modular contractions, the fundamental contraction inequalities, and the fixed-point solver.

A self-map ``T`` is a modular contraction with constants ``(k, lambda0)``
when ``w_{k lam}(Tx, Ty) <= w_lam(x, y)`` for ``0 < lam <= lambda0``, and a
strong one when the right side carries an extra factor ``k``.  Iterating
such a map from any start converges modularly to its unique fixed point
when ``w`` is strict, convex and finite valued.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable

from .extreal import INF, ExtNonNegReal
from .metrics import BisectionConfig, d_w_star
from .modular import Modular, PreconditionError, check_lambda
from .reports import CheckReport, Witness, judge
from .sampling import SamplingPlan

__all__ = [
    "SelfMap",
    "ContractionParams",
    "SolveReport",
    "verify_contraction",
    "verify_strong_contraction",
    "estimate_min_k",
    "check_fund1",
    "check_fund2",
    "check_palais",
    "verify_theorem_conditions",
    "solve",
    "LAMBDA_FLOOR",
    "TRACE_CAP",
]

# stand-in for lam -> 0+ when a split puts all weight on one side
LAMBDA_FLOOR = 1e-9
TRACE_CAP = 10_000
# log-uniform draws of lam span this many decades below lambda0
_LAMBDA_DECADES = 6


@dataclass(frozen=True, eq=False)
class SelfMap:
    """``T: X -> X`` over a fixed carrier; closure is checked on every call."""

    apply: Callable[[Any], Any]
    space: Any
    name: str = "T"

    def __call__(self, x):
        y = self.apply(x)
        if not self.space.contains(y):
            raise ValueError(f"{self.name} maps {x!r} to {y!r}, outside the carrier")
        return y


@dataclass(frozen=True)
class ContractionParams:
    k: float
    lambda0: float = 1.0

    def __post_init__(self):
        if not 0 < self.k < 1:
            raise ValueError(f"k must lie in (0, 1), got {self.k!r}")
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise ValueError(f"lambda0 must be positive, got {self.lambda0!r}")


@dataclass
class SolveReport:
    iterates: list
    n_iters: int
    stop_reason: str
    residual_trace: list
    approx_fixed_point: Any = None
    iterates_truncated: bool = False
    details: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.stop_reason == "residual_met"

    def to_dict(self) -> dict:
        return {
            "n_iters": self.n_iters,
            "stop_reason": self.stop_reason,
            "residuals": self.residual_trace,
            "fixed_point": self.approx_fixed_point,
            "iterates_truncated": self.iterates_truncated,
            "details": self.details,
        }


# --- sampling ---------------------------------------------------------------


def _draw_pairs(space, plan: SamplingPlan, lambda0: float, stream: int = 1) -> list[dict]:
    """Seeded ``(x, y, lam)`` draws; every fourth sample has ``y = x``.

    ``lam`` is log-uniform on ``[lambda0 * 1e-6, lambda0]``.
    """
    rng = plan.rng(stream)
    out = []
    for i in range(plan.n_samples):
        x, y = space.sample(rng), space.sample(rng)
        if i % 4 == 2:
            y = x
        lam = lambda0 * 10.0 ** (-_LAMBDA_DECADES * float(rng.random()))
        u = float(rng.random())
        out.append({"index": i, "x": x, "y": y, "lambda": lam, "u": u})
    return out


def _same_set(w, x, y, grid) -> bool:
    return any(w(lam, x, y).is_finite for lam in grid)


# --- contraction checks -----------------------------------------------------


def _contraction_sides(w, T, k, inp, strong):
    lam = inp["lambda"]
    x, y = inp["x"], inp["y"]
    lhs = w(k * lam, T(x), T(y))
    rhs = w(lam, x, y)
    if strong:
        rhs = rhs * k
    return lhs, rhs


def _contraction_sweep(w, T, p, samples, plan, strong, name):
    report = CheckReport(name)
    for s in samples:
        inp = {"index": s["index"], "x": s["x"], "y": s["y"], "lambda": s["lambda"]}
        if not _same_set(w, s["x"], s["y"], plan.lambda_grid):
            report.skip("different_modular_sets")
            continue
        report.samples_tested += 1
        lhs, rhs = _contraction_sides(w, T, p.k, inp, strong)
        ok, slack = judge(lhs, rhs, "leq", rel_tol=plan.slack_tol)
        report.record(ok, slack, Witness({**inp, "k": p.k}, lhs, rhs, slack))
    report.details = {"modular": w.name, "map": T.name, "k": p.k, "lambda0": p.lambda0}
    return report


def verify_contraction(w: Modular, T: SelfMap, p: ContractionParams,
                       plan: SamplingPlan | None = None) -> CheckReport:
    """Sampled check of ``w_{k lam}(Tx, Ty) <= w_lam(x, y)``."""
    plan = plan or SamplingPlan()
    return _contraction_sweep(w, T, p, _draw_pairs(T.space, plan, p.lambda0), plan, False, "contraction")


def verify_strong_contraction(w: Modular, T: SelfMap, p: ContractionParams,
                              plan: SamplingPlan | None = None) -> CheckReport:
    """Sampled check of ``w_{k lam}(Tx, Ty) <= k w_lam(x, y)``."""
    plan = plan or SamplingPlan()
    return _contraction_sweep(w, T, p, _draw_pairs(T.space, plan, p.lambda0), plan, True, "strong_contraction")


def estimate_min_k(w: Modular, T: SelfMap, lambda0: float, mode: str = "plain",
                   plan: SamplingPlan | None = None, tol: float = 1e-4) -> float | None:
    """Smallest ``k`` (within ``tol``) passing the sampled contraction check, or None.

    One fixed sample set is used for every trial ``k``; passing is
    monotone in ``k`` because ``w`` is non-increasing in ``lam``.
    """
    if mode not in ("plain", "strong"):
        raise ValueError(f"mode must be 'plain' or 'strong', got {mode!r}")
    plan = plan or SamplingPlan()
    strong = mode == "strong"
    samples = [s for s in _draw_pairs(T.space, plan, lambda0)
               if _same_set(w, s["x"], s["y"], plan.lambda_grid)]
    # images do not depend on k
    images = [(T(s["x"]), T(s["y"])) for s in samples]

    def passes(k: float) -> bool:
        for s, (tx, ty) in zip(samples, images):
            rhs = w(s["lambda"], s["x"], s["y"])
            if strong:
                rhs = rhs * k
            ok, _ = judge(w(k * s["lambda"], tx, ty), rhs, "leq", rel_tol=plan.slack_tol)
            if not ok:
                return False
        return True

    hi = 1.0 - tol
    if not passes(hi):
        return None
    lo = 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _require_contraction(w, T, k, lambda0, plan, strong):
    check = verify_strong_contraction if strong else verify_contraction
    rep = check(w, T, ContractionParams(k, lambda0), plan)
    if not rep.passed:
        kind = "strong modular" if strong else "modular"
        raise PreconditionError(f"{T.name} is not a {kind} contraction with k={k} on the sample set")
    return rep


# --- fundamental inequalities -----------------------------------------------


def _split(inp, k):
    """``(lam1, lam2)`` with ``lam1 + lam2 = (1 - k) lam``; patterns force the endpoints."""
    budget = (1.0 - k) * inp["lambda"]
    if inp["index"] % 8 == 5:
        return 0.0, budget
    if inp["index"] % 8 == 6:
        return budget, 0.0
    lam1 = inp["u"] * budget
    return lam1, budget - lam1


def _edge_term(w, lam_i, a, ta, weighted):
    """``lam_i * w_{lam_i}(a, Ta)`` (or the bare modular); ``lam_i = 0`` uses ``LAMBDA_FLOOR``.

    Returns None when the limiting value is infinite and cannot be trusted.
    """
    if lam_i > 0:
        v = w(lam_i, a, ta)
        return v * lam_i if weighted else v
    v = w(LAMBDA_FLOOR, a, ta)
    if v.is_inf:
        return None
    return v * LAMBDA_FLOOR if weighted else v


def fund1_sides(w, T, k, x, y, lam, lam1, lam2):
    """Both sides of the convex fundamental inequality at one point."""
    lhs = w(lam, x, y)
    t1 = _edge_term(w, lam1, x, T(x), True)
    t2 = _edge_term(w, lam2, y, T(y), True)
    if t1 is None or t2 is None:
        return lhs, None
    return lhs, (t1 + t2) / (lam * (1.0 - k))


def fund2_sides(w, T, k, x, y, lam, lam1, lam2):
    """Both sides of the strong fundamental inequality at one point."""
    lhs = w(lam, x, y)
    t1 = _edge_term(w, lam1, x, T(x), False)
    t2 = _edge_term(w, lam2, y, T(y), False)
    if t1 is None or t2 is None:
        return lhs, None
    return lhs, (t1 + t2) / (1.0 - k)


def _fund_sweep(name, sides, w, T, k, lambda0, plan):
    report = CheckReport(name)
    for s in _draw_pairs(T.space, plan, lambda0, stream=2):
        x, y = s["x"], s["y"]
        # lam strictly below lambda0
        lam = s["lambda"] * (1.0 - 1e-12)
        if w(lam, x, y).is_inf:
            report.skip("infinite_lhs")
            continue
        lam1, lam2 = _split(s, k)
        lhs, rhs = sides(w, T, k, x, y, lam, lam1, lam2)
        if rhs is None:
            report.skip("boundary-indeterminate")
            continue
        report.samples_tested += 1
        ok, slack = judge(lhs, rhs, "leq", rel_tol=plan.slack_tol)
        inp = {"index": s["index"], "x": x, "y": y, "lambda": lam, "lambda1": lam1, "lambda2": lam2, "k": k}
        report.record(ok, slack, Witness(inp, lhs, rhs, slack))
    report.details = {"modular": w.name, "map": T.name, "k": k, "lambda0": lambda0,
                      "lambda_floor": LAMBDA_FLOOR}
    return report


def check_fund1(w: Modular, T: SelfMap, k: float, plan: SamplingPlan | None = None,
                lambda0: float = 1.0) -> CheckReport:
    """``w_lam(x,y) <= (lam1 w_lam1(x,Tx) + lam2 w_lam2(y,Ty)) / (lam (1-k))`` on samples.

    Requires a convex modular and a map that passes the contraction check
    with the same ``k`` and ``lambda0``.
    """
    if not w.claimed_convex:
        raise PreconditionError("the convex fundamental inequality needs a convex modular")
    plan = plan or SamplingPlan()
    _require_contraction(w, T, k, lambda0, plan, strong=False)
    return _fund_sweep("fundamental_modular_inequality", fund1_sides, w, T, k, lambda0, plan)


def check_fund2(w: Modular, T: SelfMap, k: float, plan: SamplingPlan | None = None,
                lambda0: float = 1.0) -> CheckReport:
    """``w_lam(x,y) <= (w_lam1(x,Tx) + w_lam2(y,Ty)) / (1-k)`` on samples, for strong contractions."""
    plan = plan or SamplingPlan()
    _require_contraction(w, T, k, lambda0, plan, strong=True)
    return _fund_sweep("fundamental_strong_modular_inequality", fund2_sides, w, T, k, lambda0, plan)


def check_palais(space, T: SelfMap, k: float, plan: SamplingPlan | None = None) -> CheckReport:
    """The metric version ``d(x,y) <= (d(x,Tx) + d(y,Ty)) / (1-k)``.

    ``T`` is first checked to be a metric contraction with constant ``k``
    on the same pairs.
    """
    plan = plan or SamplingPlan()
    d = space.distance
    samples = _draw_pairs(space, plan, 1.0, stream=3)
    for s in samples:
        x, y = s["x"], s["y"]
        ok, _ = judge(d(T(x), T(y)), d(x, y) * k, "leq", rel_tol=plan.slack_tol)
        if not ok:
            raise PreconditionError(f"{T.name} is not a metric contraction with k={k} at {x!r}, {y!r}")
    report = CheckReport("fundamental_contraction_inequality")
    for s in samples:
        x, y = s["x"], s["y"]
        lhs = d(x, y)
        rhs = (d(x, T(x)) + d(y, T(y))) / (1.0 - k)
        report.samples_tested += 1
        ok, slack = judge(lhs, rhs, "leq", rel_tol=plan.slack_tol)
        report.record(ok, slack, Witness({"index": s["index"], "x": x, "y": y, "k": k}, lhs, rhs, slack))
    report.details = {"map": T.name, "k": k}
    return report


# --- fixed-point theorems ---------------------------------------------------


def verify_theorem_conditions(w: Modular, T: SelfMap, grid, plan: SamplingPlan | None = None,
                              orbit_length: int = 64, n_orbits: int = 8) -> CheckReport:
    """Check the hypotheses of the modular fixed-point theorems on samples.

    For each grid scale a point with ``w_lam(x, Tx) < inf`` is searched
    among sampled points and the first ``orbit_length`` iterates of
    ``n_orbits`` sampled starts.  If every sampled value of ``w`` is finite
    the search is reported as redundant.
    """
    plan = plan or SamplingPlan()
    rng = plan.rng(4)
    space = T.space
    starts = [space.sample(rng) for _ in range(plan.n_samples)]
    candidates = list(starts)
    for x in starts[:n_orbits]:
        for _ in range(orbit_length):
            x = T(x)
            candidates.append(x)

    finite_valued = True
    for i in range(0, len(starts) - 1, 2):
        for lam in grid:
            if w(lam, starts[i], starts[i + 1]).is_inf:
                finite_valued = False
                break
        if not finite_valued:
            break

    report = CheckReport("theorem_conditions")
    witnesses = []
    for lam in grid:
        report.samples_tested += 1
        found = None
        best = INF
        for x in candidates:
            v = w(lam, x, T(x))
            if v.is_finite:
                found, best = x, v
                break
        if found is None:
            ok = finite_valued
            report.record(ok, math.inf, Witness({"lambda": lam, "check": "exists x: w(x, Tx) < inf"},
                                                INF, INF, math.inf))
        else:
            report.record(True, -math.inf)
            witnesses.append({"lambda": lam, "x": found, "w_x_Tx": best})
    if finite_valued:
        condition = "redundant"
    elif report.passed:
        condition = "satisfied"
    else:
        condition = "unsatisfied"
    report.details = {
        "modular": w.name,
        "map": T.name,
        "finite_valued": finite_valued,
        "condition": condition,
        "strict": w.claimed_strict,
        "convex": w.claimed_convex,
        "witnesses": witnesses,
    }
    return report


def solve(w: Modular, T: SelfMap, x0, lambda_star: float, tol: float, max_iter: int = 1000,
          cfg: BisectionConfig | None = None) -> SolveReport:
    """Iterate ``x_{n+1} = T(x_n)`` until ``w_{lambda_star}(x_n, x_{n+1}) <= tol``.

    ``n_iters`` counts applications of ``T``.  When ``w`` is convex the
    final step's ``d_w_star`` is recorded too.
    """
    lambda_star = check_lambda(lambda_star)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if not T.space.contains(x0):
        raise ValueError(f"starting point {x0!r} is outside the carrier")

    head = [x0]
    tail: deque = deque(maxlen=TRACE_CAP // 2)
    truncated = False
    residuals: list[ExtNonNegReal] = []
    x = x0
    inf_run = 0
    stop = "max_iter"
    fixed = None
    prev = x0
    for n in range(max_iter):
        nxt = T(x)
        r = w(lambda_star, x, nxt)
        residuals.append(r)
        if len(head) < TRACE_CAP // 2:
            head.append(nxt)
        else:
            truncated = True
            tail.append(nxt)
        inf_run = inf_run + 1 if r.is_inf else 0
        prev, x = x, nxt
        if r <= tol:
            stop, fixed = "residual_met", nxt
            break
    else:
        if inf_run == max_iter:
            stop = "nonfinite_residual"

    details: dict = {"lambda_star": lambda_star, "tol": tol, "max_iter": max_iter}
    if w.claimed_convex:
        details["final_d_w_star"] = d_w_star(w, prev, x, cfg)
    return SolveReport(
        iterates=head + list(tail),
        n_iters=len(residuals),
        stop_reason=stop,
        residual_trace=residuals,
        approx_fixed_point=fixed,
        iterates_truncated=truncated,
        details=details,
    )
