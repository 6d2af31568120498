"""Seeded sampling plans shared by every property sweep."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SamplingPlan", "default_lambda_grid", "DEFAULT_SLACK_TOL"]

DEFAULT_SLACK_TOL = 1e-9


def default_lambda_grid(n: int = 33, lo: float = 1e-6, hi: float = 1e6) -> tuple[float, ...]:
    """``n`` log-spaced scales on ``[lo, hi]`` (33 points gives one per quarter decade)."""
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), n))


@dataclass(frozen=True)
class SamplingPlan:
    seed: int = 0
    n_samples: int = 1000
    lambda_grid: tuple[float, ...] = field(default_factory=default_lambda_grid)
    slack_tol: float = DEFAULT_SLACK_TOL

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ValueError("lambda_grid must be nonempty")
        if any(not (v > 0 and np.isfinite(v)) for v in grid):
            raise ValueError("lambda_grid entries must be strictly positive and finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("lambda_grid must be strictly ascending")
        if self.n_samples < 0:
            raise ValueError("n_samples must be nonnegative")
        if not self.slack_tol >= 0:
            raise ValueError("slack_tol must be nonnegative")
        object.__setattr__(self, "lambda_grid", grid)
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFF_FFFF_FFFF_FFFF)

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Fresh generator; the same (seed, stream) always yields the same draws."""
        return np.random.Generator(np.random.PCG64([self.seed, stream]))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_samples": self.n_samples,
            "lambda_grid": list(self.lambda_grid),
            "slack_tol": self.slack_tol,
        }
