"""Metric modulars and sampling-based verification of their defining properties.

A metric modular is a map ``(lam, x, y) -> w_lam(x, y)`` into [0, inf] with

1. ``w_lam(x, y) == 0`` iff ``x == y``;
2. ``w_lam(x, y) == w_lam(y, x)``;
3. ``w_{lam+mu}(x, y) <= w_lam(x, z) + w_mu(y, z)``.

It is convex when 3 holds in the weighted form
``w_{lam+mu}(x, y) <= lam/(lam+mu) w_lam(x, z) + mu/(lam+mu) w_mu(z, y)``,
and strict when ``w_lam(x, y) > 0`` for every ``lam`` whenever ``x != y``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from .extreal import ExtNonNegReal, ext
from .reports import CheckReport, Witness, judge
from .sampling import SamplingPlan

__all__ = [
    "Modular",
    "evaluate",
    "scaled_modular",
    "check_property",
    "replay_witness",
    "PROPERTIES",
    "SamplingError",
    "PreconditionError",
]

PROPERTIES = (
    "axiom1",
    "symmetry",
    "triangle3",
    "convexity",
    "strictness",
    "monotone_lambda",
    "convex_limits",
)

# convex_limits thresholds: allowed factor against the exact convex bound
LIMIT_FACTOR = 10.0


class SamplingError(RuntimeError):
    """The carrier cannot supply the points a property needs."""


class PreconditionError(ValueError):
    """An operation was called on an object that lacks a required property."""


def check_lambda(lam) -> float:
    lam = float(lam)
    if not (lam > 0) or math.isinf(lam):
        raise ValueError(f"lambda must be strictly positive and finite, got {lam!r}")
    return lam


@dataclass(frozen=True, eq=False)
class Modular:
    """An evaluation rule plus the properties its author claims for it.

    ``rule(lam, x, y)`` may return a float (``inf`` allowed) or an
    :class:`ExtNonNegReal`.  When ``space`` is given, points are checked
    for membership on every evaluation.
    """

    rule: Callable[[float, Any, Any], Any]
    space: Any = None
    claimed_convex: bool = False
    claimed_strict: bool = False
    claimed_finite: bool = False
    name: str = "modular"

    def __call__(self, lam, x, y) -> ExtNonNegReal:
        return evaluate(self, lam, x, y)

    def flags(self) -> dict:
        return {
            "convex": self.claimed_convex,
            "strict": self.claimed_strict,
            "finite": self.claimed_finite,
        }


def evaluate(w: Modular, lam, x, y) -> ExtNonNegReal:
    """``w_lam(x, y)``."""
    lam = check_lambda(lam)
    if w.space is not None:
        for p in (x, y):
            if not w.space.contains(p):
                raise ValueError(f"point {p!r} is not in the carrier of {w.name}")
    return ext(w.rule(lam, x, y))


def scaled_modular(w: Modular) -> Modular:
    """The modular ``lam -> w_lam / lam``; a modular whenever ``w`` is convex."""

    def rule(lam, x, y):
        return evaluate(w, lam, x, y) / lam

    return Modular(
        rule,
        space=w.space,
        claimed_convex=False,
        claimed_strict=w.claimed_strict,
        claimed_finite=w.claimed_finite,
        name=f"scaled({w.name})",
    )


# --- elementary comparisons, shared by sweeps and replay -------------------
#
# Each returns (lhs, rhs, relation) for one fully specified input record.


def _sides_triangle3(w, inp):
    lam, mu = inp["lambda"], inp["mu"]
    lhs = w(lam + mu, inp["x"], inp["y"])
    rhs = w(lam, inp["x"], inp["z"]) + w(mu, inp["y"], inp["z"])
    return lhs, rhs, "leq"


def _sides_convexity(w, inp):
    lam, mu = inp["lambda"], inp["mu"]
    s = lam + mu
    lhs = w(s, inp["x"], inp["y"])
    a, b = w(lam, inp["x"], inp["z"]), w(mu, inp["z"], inp["y"])
    # 0 * inf never arises: both weights are strictly positive
    rhs = a * (lam / s) + b * (mu / s)
    return lhs, rhs, "leq"


def _sides_symmetry(w, inp):
    return w(inp["lambda"], inp["x"], inp["y"]), w(inp["lambda"], inp["y"], inp["x"]), "eq"


def _sides_identity(w, inp):
    return w(inp["lambda"], inp["x"], inp["x"]), ext(0.0), "eq"


def _sides_positive_some(w, inp):
    return w(inp["lambda"], inp["x"], inp["y"]), ext(inp["threshold"]), "gt"


def _sides_strict(w, inp):
    return w(inp["lambda"], inp["x"], inp["y"]), ext(0.0), "gt"


def _sides_monotone(w, inp):
    return w(inp["lambda"], inp["x"], inp["y"]), w(inp["lambda2"], inp["x"], inp["y"]), "geq"


def _sides_decay(w, inp):
    ref = w(inp["lambda_ref"], inp["x"], inp["y"])
    bound = ref * (LIMIT_FACTOR * inp["lambda_ref"] / inp["lambda"])
    return w(inp["lambda"], inp["x"], inp["y"]), bound, "leq"


def _sides_growth(w, inp):
    ref = w(inp["lambda_ref"], inp["x"], inp["y"])
    bound = ref * (inp["lambda_ref"] / inp["lambda"] / LIMIT_FACTOR)
    return w(inp["lambda"], inp["x"], inp["y"]), bound, "geq"


_SIDES = {
    "triangle3": _sides_triangle3,
    "convexity": _sides_convexity,
    "symmetry": _sides_symmetry,
    "identity": _sides_identity,
    "positive_somewhere": _sides_positive_some,
    "strictness": _sides_strict,
    "monotone_lambda": _sides_monotone,
    "decay": _sides_decay,
    "growth": _sides_growth,
}


def replay_witness(w: Modular, witness: Witness, slack_tol: float = 0.0) -> tuple:
    """Re-evaluate a witness; returns ``(lhs, rhs, ok, slack)``."""
    inp = witness.inputs
    lhs, rhs, rel = _SIDES[inp["check"]](w, inp)
    ok, slack = judge(lhs, rhs, rel, rel_tol=slack_tol if rel != "gt" else 0.0)
    return lhs, rhs, ok, slack


# --- sample generation -----------------------------------------------------

# Sample index i uses pattern i % 4: generic draw, (z = y, mu = lam),
# y = x, z = x.  Pattern 1 is the standard non-convexity construction.
_N_PATTERNS = 4

_NEEDS_DISTINCT = {"strictness", "convex_limits"}


def _draw_samples(space, plan: SamplingPlan) -> list[dict]:
    rng = plan.rng()
    n_grid = len(plan.lambda_grid)
    out = []
    for i in range(plan.n_samples):
        x, y, z = space.sample(rng), space.sample(rng), space.sample(rng)
        il, im = int(rng.integers(n_grid)), int(rng.integers(n_grid))
        pattern = i % _N_PATTERNS
        if pattern == 1:
            z, im = y, il
        elif pattern == 2:
            y = x
        elif pattern == 3:
            z = x
        out.append({"index": i, "x": x, "y": y, "z": z,
                    "lambda": plan.lambda_grid[il], "mu": plan.lambda_grid[im]})
    return out


def _distinct_possible(space) -> bool:
    size = getattr(space, "size", None)
    return size is None or size >= 2


# --- per-sample evaluators -------------------------------------------------
#
# Each returns a list of (ok, slack, witness_or_None) covering that sample.
# Only the worst failing comparison of a sample becomes a witness.


def _judged(w, inp, slack_tol):
    lhs, rhs, rel = _SIDES[inp["check"]](w, inp)
    ok, slack = judge(lhs, rhs, rel, rel_tol=slack_tol if rel != "gt" else 0.0)
    return ok, slack, Witness(inp, lhs, rhs, slack, rel)


def _worst(results):
    """Collapse many judged comparisons of one sample into one outcome."""
    slacks = [s for _, s, _ in results]
    failing = [r for r in results if not r[0]]
    top = max(slacks) if slacks else -math.inf
    if failing:
        bad = max(failing, key=lambda r: r[1])
        return [(False, top, bad[2])]
    return [(True, top, None)]


def _eval_sample(w, space, prop, s, plan):
    tol = plan.slack_tol
    grid = plan.lambda_grid
    x, y, z = s["x"], s["y"], s["z"]
    base = {"index": s["index"]}
    same = space.equal(x, y)

    if prop == "triangle3":
        return [_judged(w, {**base, "check": "triangle3", "x": x, "y": y, "z": z,
                            "lambda": s["lambda"], "mu": s["mu"]}, tol)]
    if prop == "convexity":
        return [_judged(w, {**base, "check": "convexity", "x": x, "y": y, "z": z,
                            "lambda": s["lambda"], "mu": s["mu"]}, tol)]
    if prop == "symmetry":
        return _worst([_judged(w, {**base, "check": "symmetry", "x": x, "y": y, "lambda": lam}, tol)
                       for lam in grid])
    if prop == "axiom1":
        if same:
            return _worst([_judged(w, {**base, "check": "identity", "x": x, "lambda": lam}, tol)
                           for lam in grid])
        vals = [w(lam, x, y) for lam in grid]
        best = max(range(len(grid)), key=lambda i: vals[i])
        return [_judged(w, {**base, "check": "positive_somewhere", "x": x, "y": y,
                            "lambda": grid[best], "threshold": tol}, tol)]
    if prop == "strictness":
        if same:
            return None
        return _worst([_judged(w, {**base, "check": "strictness", "x": x, "y": y, "lambda": lam}, tol)
                       for lam in grid])
    if prop == "monotone_lambda":
        return _worst([_judged(w, {**base, "check": "monotone_lambda", "x": x, "y": y,
                                   "lambda": a, "lambda2": b}, tol)
                       for a, b in zip(grid, grid[1:])])
    if prop == "convex_limits":
        if same:
            return None
        ref = None
        for lam in grid:
            v = w(lam, x, y)
            if v.is_finite and v.value > 0:
                ref = lam
                break
        if ref is None:
            return "no_finite_positive_reference"
        return _worst([
            _judged(w, {**base, "check": "decay", "x": x, "y": y, "lambda": grid[-1], "lambda_ref": ref}, tol),
            _judged(w, {**base, "check": "growth", "x": x, "y": y, "lambda": grid[0], "lambda_ref": ref}, tol),
        ])
    raise ValueError(f"unknown property {prop!r}")


def check_property(w: Modular, space, prop: str, plan: SamplingPlan | None = None,
                   workers: int = 1) -> CheckReport:
    """Sweep one property over seeded samples and collect violation witnesses.

    Results do not depend on ``workers``: samples are drawn up front and
    merged back in index order.
    """
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    plan = plan or SamplingPlan()
    if prop == "convex_limits" and not w.claimed_convex:
        raise PreconditionError("convex_limits requires a modular claimed convex")
    if prop in _NEEDS_DISTINCT and not _distinct_possible(space):
        raise SamplingError(f"{prop} needs two distinct points; the carrier has one")

    samples = _draw_samples(space, plan)

    def task(s):
        return _eval_sample(w, space, prop, s, plan)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(task, samples))
    else:
        outcomes = [task(s) for s in samples]

    report = CheckReport(prop)
    for out in outcomes:
        if out is None:
            report.skip("identical_points")
            continue
        if isinstance(out, str):
            report.skip(out)
            continue
        report.samples_tested += 1
        for ok, slack, wit in out:
            report.record(ok, slack, None if ok else wit)
    report.details = {"modular": w.name, "flags": w.flags(), "slack_tol": plan.slack_tol}
    return report

