"""Carriers with a base metric, and the built-in modulars defined on them.

Three carriers are provided: finite metric spaces given by a distance
matrix, Euclidean space, and land/water grids where the distance between
two land cells is the length of the shortest 4-neighbour path over land
(infinite across water).
"""

from __future__ import annotations

import json
import math
import threading
from collections import deque
from numbers import Integral, Real
from pathlib import Path

import numpy as np

from .extreal import INF, ZERO, ExtNonNegReal, from_json
from .modular import Modular

__all__ = [
    "SpaceError",
    "PointSpace",
    "FiniteSpace",
    "EuclideanSpace",
    "LandmassGrid",
    "build_finite",
    "build_euclidean",
    "load_landmass",
    "load_landmass_file",
    "load_finite_file",
    "geodesic",
    "builtin_modular",
    "table_modular",
    "BUILTIN_KINDS",
]

BUILTIN_KINDS = ("metric_as_modular", "average_speed", "step")


class SpaceError(ValueError):
    """Invalid carrier data.  ``witness`` holds the offending indices, if any."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class PointSpace:
    """A carrier with element equality, a sampler and a base metric."""

    kind: str = "abstract"

    def contains(self, x) -> bool:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator):
        raise NotImplementedError

    def distance(self, x, y) -> ExtNonNegReal:
        raise NotImplementedError

    def equal(self, x, y) -> bool:
        return x == y

    @property
    def points(self) -> tuple | None:
        """Every point, for enumerable carriers; ``None`` otherwise."""
        return None

    @property
    def size(self) -> int | None:
        pts = self.points
        return None if pts is None else len(pts)

    @property
    def metric_is_finite(self) -> bool:
        return True

    def describe(self) -> dict:
        return {"kind": self.kind}


class FiniteSpace(PointSpace):
    kind = "finite"

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix
        self._points = tuple(range(matrix.shape[0]))

    def contains(self, x) -> bool:
        return isinstance(x, Integral) and not isinstance(x, bool) and 0 <= x < len(self._points)

    def sample(self, rng):
        return int(rng.integers(len(self._points)))

    def distance(self, x, y) -> ExtNonNegReal:
        return ExtNonNegReal(self.matrix[x, y])

    @property
    def points(self):
        return self._points

    @property
    def metric_is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.matrix)))

    def describe(self) -> dict:
        return {"kind": self.kind, "n": len(self._points)}


def build_finite(matrix) -> FiniteSpace:
    """Validate a distance matrix (``inf`` entries allowed) and wrap it as a space."""
    try:
        d = np.array([[float(from_json(v)) if isinstance(v, str) else float(v) for v in row] for row in matrix])
    except (TypeError, ValueError) as exc:
        raise SpaceError(f"distance matrix must hold numbers: {exc}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise SpaceError(f"distance matrix must be square and nonempty, got shape {d.shape}")
    if np.isnan(d).any():
        raise SpaceError("distance matrix contains NaN")
    bad = np.argwhere(d < 0)
    if bad.size:
        i, j = map(int, bad[0])
        raise SpaceError(f"negative distance d[{i}][{j}] = {d[i, j]}", (i, j))
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        i = int(diag[0])
        raise SpaceError(f"non-zero diagonal d[{i}][{i}] = {d[i, i]}", (i, i))
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = map(int, asym[0])
        raise SpaceError(f"asymmetric: d[{i}][{j}] = {d[i, j]} but d[{j}][{i}] = {d[j, i]}", (i, j))
    n = d.shape[0]
    zero_off = np.argwhere((d == 0) & ~np.eye(n, dtype=bool))
    if zero_off.size:
        i, j = map(int, zero_off[0])
        raise SpaceError(f"distinct points {i} and {j} at distance 0", (i, j))
    # via[i, j, k] = d[i, j] + d[j, k]; inf + finite stays inf
    with np.errstate(invalid="ignore"):
        via = d[:, :, None] + d[None, :, :]
        excess = d[:, None, :] > via * (1 + 1e-12)
    hits = np.argwhere(excess)
    if hits.size:
        i, j, k = map(int, hits[0])
        raise SpaceError(
            f"triangle violation: d[{i}][{k}] = {d[i, k]} > d[{i}][{j}] + d[{j}][{k}] = {d[i, j] + d[j, k]}",
            (i, j, k),
        )
    d.setflags(write=False)
    return FiniteSpace(d)


def load_finite_file(path) -> FiniteSpace:
    """Load ``{"matrix": [[...]]}`` (or a bare nested list) from JSON."""
    doc = json.loads(Path(path).read_text())
    matrix = doc["matrix"] if isinstance(doc, dict) else doc
    return build_finite(matrix)


class EuclideanSpace(PointSpace):
    """R^dim with the Euclidean distance.

    Points of the real line are plain floats; higher-dimensional points are
    tuples of floats.
    """

    kind = "euclidean"

    def __init__(self, dim: int, box: tuple[float, float] = (-10.0, 10.0)):
        self.dim = dim
        self.box = (float(box[0]), float(box[1]))

    def _coords(self, x) -> tuple:
        if self.dim == 1 and isinstance(x, Real):
            return (float(x),)
        return tuple(float(c) for c in x)

    def canonical(self, coords):
        coords = [float(c) for c in np.ravel(coords)]
        return coords[0] if self.dim == 1 else tuple(coords)

    def contains(self, x) -> bool:
        if isinstance(x, bool):
            return False
        try:
            c = self._coords(x)
        except TypeError:
            return False
        return len(c) == self.dim and all(math.isfinite(v) for v in c)

    def sample(self, rng):
        lo, hi = self.box
        return self.canonical(rng.uniform(lo, hi, self.dim))

    def distance(self, x, y) -> ExtNonNegReal:
        if self.dim == 1:
            return ExtNonNegReal(abs(float(x) - float(y)))
        return ExtNonNegReal(math.dist(self._coords(x), self._coords(y)))

    def equal(self, x, y) -> bool:
        return self._coords(x) == self._coords(y)

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "box": list(self.box)}


def build_euclidean(dim: int, box: tuple[float, float] = (-10.0, 10.0)) -> EuclideanSpace:
    if not isinstance(dim, Integral) or dim < 1:
        raise SpaceError(f"dimension must be a positive integer, got {dim!r}")
    if not box[0] < box[1]:
        raise SpaceError(f"sampling box must satisfy lo < hi, got {box!r}")
    return EuclideanSpace(int(dim), box)


_NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))


class LandmassGrid(PointSpace):
    """Land cells of a rectangular map; points are ``(row, col)`` tuples."""

    kind = "landmass"

    def __init__(self, land: np.ndarray, cell_size: float = 1.0):
        self.land = land
        self.rows, self.cols = land.shape
        self.cell_size = float(cell_size)
        self._points = tuple((int(r), int(c)) for r, c in np.argwhere(land))
        self._index = {p: i for i, p in enumerate(self._points)}
        self.labels = self._label_components()
        self.n_components = int(self.labels.max()) + 1
        self._steps: dict[int, tuple[dict, np.ndarray]] = {}
        self._lock = threading.Lock()

    def _label_components(self) -> np.ndarray:
        labels = -np.ones(len(self._points), dtype=int)
        comp = 0
        for start in range(len(self._points)):
            if labels[start] >= 0:
                continue
            labels[start] = comp
            queue = deque([self._points[start]])
            while queue:
                r, c = queue.popleft()
                for nb in self._neighbours(r, c):
                    j = self._index[nb]
                    if labels[j] < 0:
                        labels[j] = comp
                        queue.append(nb)
            comp += 1
        return labels

    def _neighbours(self, r, c):
        for dr, dc in _NEIGHBOURS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < self.rows and 0 <= nc < self.cols and self.land[nr, nc]:
                yield (nr, nc)

    def _component_steps(self, comp: int):
        """All-pairs hop counts inside one component, computed once."""
        cached = self._steps.get(comp)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._steps.get(comp)
            if cached is not None:
                return cached
            members = [p for p, lab in zip(self._points, self.labels) if lab == comp]
            local = {p: i for i, p in enumerate(members)}
            steps = np.full((len(members), len(members)), -1, dtype=np.int64)
            for i, src in enumerate(members):
                steps[i, i] = 0
                queue = deque([src])
                while queue:
                    cur = queue.popleft()
                    for nb in self._neighbours(*cur):
                        j = local[nb]
                        if steps[i, j] < 0:
                            steps[i, j] = steps[i, local[cur]] + 1
                            queue.append(nb)
            self._steps[comp] = (local, steps)
            return self._steps[comp]

    def component_of(self, cell) -> int:
        return int(self.labels[self._index[cell]])

    def components(self) -> list[list[tuple[int, int]]]:
        out = [[] for _ in range(self.n_components)]
        for p, lab in zip(self._points, self.labels):
            out[lab].append(p)
        return out

    def contains(self, x) -> bool:
        try:
            return tuple(x) in self._index
        except TypeError:
            return False

    def sample(self, rng):
        return self._points[int(rng.integers(len(self._points)))]

    def distance(self, x, y) -> ExtNonNegReal:
        return geodesic(self, x, y)

    @property
    def points(self):
        return self._points

    @property
    def metric_is_finite(self) -> bool:
        return self.n_components == 1

    def describe(self) -> dict:
        return {"kind": self.kind, "rows": self.rows, "cols": self.cols,
                "cell_size": self.cell_size, "components": self.n_components}


def load_landmass(map_text: str, cell_size: float = 1.0) -> LandmassGrid:
    """Parse a map of ``#`` (land) and ``.`` (water) rows."""
    if not (isinstance(cell_size, Real) and cell_size > 0 and math.isfinite(cell_size)):
        raise SpaceError(f"cell_size must be positive and finite, got {cell_size!r}")
    lines = map_text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise SpaceError("empty map")
    width = len(lines[0])
    for r, line in enumerate(lines):
        if len(line) != width:
            raise SpaceError(f"ragged map: row {r} has {len(line)} cells, expected {width}", (r,))
        for c, ch in enumerate(line):
            if ch not in "#.":
                raise SpaceError(f"illegal character {ch!r} at row {r}, col {c}", (r, c))
    land = np.array([[ch == "#" for ch in line] for line in lines], dtype=bool)
    if not land.any():
        raise SpaceError("map has no land cells")
    land.setflags(write=False)
    return LandmassGrid(land, cell_size)


def load_landmass_file(path) -> LandmassGrid:
    """Read a map file; a sidecar ``<stem>.json`` may set ``cell_size``."""
    path = Path(path)
    cell_size = 1.0
    sidecar = path.with_suffix(".json")
    if sidecar != path and sidecar.exists():
        cell_size = float(json.loads(sidecar.read_text()).get("cell_size", 1.0))
    return load_landmass(path.read_text(), cell_size)


def geodesic(grid: LandmassGrid, a, b) -> ExtNonNegReal:
    """``cell_size`` times the shortest 4-neighbour land path; infinite across water."""
    a, b = tuple(a), tuple(b)
    for cell in (a, b):
        if cell not in grid._index:
            raise ValueError(f"{cell!r} is not a land cell of the grid")
    ca, cb = grid.component_of(a), grid.component_of(b)
    if ca != cb:
        return INF
    if a == b:
        return ZERO
    local, steps = grid._component_steps(ca)
    return ExtNonNegReal(grid.cell_size * float(steps[local[a], local[b]]))


def builtin_modular(space: PointSpace, kind: str) -> Modular:
    """One of the three modulars every metric space carries.

    ``metric_as_modular``: ``w_lam = d`` (ignores ``lam``).
    ``average_speed``: ``w_lam = d / lam``.
    ``step``: ``w_lam = inf`` if ``lam < d`` else ``0``.
    """
    d = space.distance
    if kind == "metric_as_modular":
        return Modular(lambda lam, x, y: d(x, y), space=space, claimed_convex=False,
                       claimed_strict=True, claimed_finite=space.metric_is_finite, name=kind)
    if kind == "average_speed":
        return Modular(lambda lam, x, y: d(x, y) / lam, space=space, claimed_convex=True,
                       claimed_strict=True, claimed_finite=space.metric_is_finite, name=kind)
    if kind == "step":
        def step(lam, x, y):
            return INF if ExtNonNegReal(lam) < d(x, y) else ZERO
        return Modular(step, space=space, claimed_convex=True, claimed_strict=False,
                       claimed_finite=False, name=kind)
    raise ValueError(f"unknown built-in modular {kind!r}; expected one of {BUILTIN_KINDS}")


def table_modular(space: FiniteSpace, lambdas, values, *, convex=False, strict=False,
                  finite=False, name="table") -> Modular:
    """A modular on a finite space tabulated at a few scales.

    ``values[k][i][j]`` is ``w`` at ``lambdas[k]``; between knots the value
    of the nearest knot below is used, and below the first knot distinct
    points are infinitely far apart.  The table must be non-increasing in
    the scale.
    """
    lams = [float(v) for v in lambdas]
    if not lams or any(v <= 0 for v in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
        raise SpaceError("table scales must be positive and strictly ascending")
    n = space.size
    tab = np.array([[[float(from_json(v)) for v in row] for row in m] for m in values])
    if tab.shape != (len(lams), n, n):
        raise SpaceError(f"table must have shape {(len(lams), n, n)}, got {tab.shape}")
    if (tab < 0).any() or np.isnan(tab).any():
        raise SpaceError("table values must be nonnegative")
    if (np.diagonal(tab, axis1=1, axis2=2) != 0).any():
        raise SpaceError("table diagonal must be zero")
    if (tab != np.transpose(tab, (0, 2, 1))).any():
        raise SpaceError("table must be symmetric in the two points")
    if (np.diff(tab, axis=0) > 0).any():
        raise SpaceError("table must be non-increasing in the scale")

    def rule(lam, x, y):
        k = int(np.searchsorted(lams, lam, side="right")) - 1
        if k < 0:
            return ZERO if x == y else INF
        return ExtNonNegReal(tab[k, x, y])

    return Modular(rule, space=space, claimed_convex=convex, claimed_strict=strict,
                   claimed_finite=finite, name=name)
