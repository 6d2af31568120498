"""Batch front end: JSON config in, deterministic JSON/text report out.

Exit codes: 0 all checks passed (or the solve converged), 1 violations
found / solve did not converge, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import __version__
from .fixedpoint import (
    ContractionParams,
    SelfMap,
    check_fund1,
    check_fund2,
    check_palais,
    estimate_min_k,
    solve,
    verify_contraction,
    verify_strong_contraction,
    verify_theorem_conditions,
)
from .metrics import BisectionConfig, check_equivalence_claim, check_metric_axioms, induced_distance
from .modular import PROPERTIES, Modular, PreconditionError, SamplingError, check_property
from .reports import dumps, jsonable
from .sampling import SamplingPlan, default_lambda_grid
from .sets import SequenceSpec, check_prop3, is_w_cauchy, is_w_convergent, partition_star
from .spaces import (
    EuclideanSpace,
    FiniteSpace,
    PointSpace,
    SpaceError,
    build_euclidean,
    build_finite,
    builtin_modular,
    load_finite_file,
    load_landmass,
    load_landmass_file,
    table_modular,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "run", "main", "COMMANDS"]

COMMANDS = ("check", "metric", "partition", "converge", "contract", "fixpoint")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class ConfigError(ValueError):
    """Invalid configuration or input data (exit code 2)."""


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, ser_json_inf_nan="strings")


# --- config schema -----------------------------------------------------------


class EuclideanCfg(_Model):
    kind: Literal["euclidean"]
    dim: int = Field(ge=1)
    box: tuple[float, float] = (-10.0, 10.0)


class FiniteCfg(_Model):
    kind: Literal["finite"]
    matrix: Optional[list[list[Union[float, str]]]] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.matrix is None) == (self.path is None):
            raise ValueError("give exactly one of 'matrix' or 'path'")
        return self


class LandmassCfg(_Model):
    kind: Literal["landmass"]
    map: Optional[str] = None
    path: Optional[str] = None
    cell_size: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.map is None) == (self.path is None):
            raise ValueError("give exactly one of 'map' or 'path'")
        return self


SpaceCfg = Annotated[Union[EuclideanCfg, FiniteCfg, LandmassCfg], Field(discriminator="kind")]


class ModularCfg(_Model):
    kind: Literal["metric_as_modular", "average_speed", "step", "table"]
    scaled: bool = False
    lambdas: Optional[list[float]] = None
    values: Optional[list[list[list[Union[float, str]]]]] = None
    convex: bool = False
    strict: bool = False
    finite: bool = False

    @model_validator(mode="after")
    def _table_fields(self):
        if self.kind == "table" and (self.lambdas is None or self.values is None):
            raise ValueError("a table modular needs 'lambdas' and 'values'")
        if self.kind != "table" and (self.lambdas is not None or self.values is not None):
            raise ValueError("'lambdas'/'values' apply only to kind 'table'")
        return self


class PlanCfg(_Model):
    seed: int = 0
    n_samples: int = Field(default=1000, ge=0)
    lambda_grid: list[float] = Field(default_factory=lambda: list(default_lambda_grid()))
    slack_tol: float = Field(default=1e-9, ge=0)


class BisectionCfg(_Model):
    lambda_min: float = Field(default=1e-9, gt=0)
    lambda_max: float = Field(default=1e12, gt=0)
    tol: float = Field(default=1e-6, gt=0)


class MapCfg(_Model):
    kind: Literal["halving", "shift", "affine", "identity", "table"]
    a: float = 0.5
    b: float = 0.0
    images: Optional[list[int]] = None


def _map_from_name(v):
    return {"kind": v} if isinstance(v, str) else v


class CheckTask(_Model):
    op: Literal["check"]
    properties: list[Literal[PROPERTIES]] = ["axiom1", "symmetry", "triangle3", "monotone_lambda"]


class MetricTask(_Model):
    op: Literal["metric"]
    metric: Literal["d_w", "d_w_star", "equivalence"] = "d_w"
    pairs: Optional[list[tuple[Any, Any]]] = None
    bisection: BisectionCfg = Field(default_factory=BisectionCfg)


class PartitionTask(_Model):
    op: Literal["partition"]
    grid: Optional[list[float]] = None


class SequenceCfg(_Model):
    kind: Literal["harmonic", "alternating", "linear", "constant", "geometric", "explicit"]
    length: int = Field(default=200, ge=1)
    value: float = 0.0
    ratio: float = 0.5
    points: Optional[list[Any]] = None


class ConvergeTask(_Model):
    op: Literal["converge"]
    mode: Literal["convergent", "cauchy", "prop3"] = "convergent"
    sequence: SequenceCfg
    limit: Any = 0.0
    tol: float = Field(default=1e-6, gt=0)
    grid: Optional[list[float]] = None
    bisection: BisectionCfg = Field(default_factory=BisectionCfg)


class ContractTask(_Model):
    op: Literal["contract"]
    mode: Literal["plain", "strong", "estimate_plain", "estimate_strong",
                  "fund1", "fund2", "palais", "theorem"] = "plain"
    map: MapCfg
    k: float = Field(default=0.5, gt=0, lt=1)
    lambda0: float = Field(default=1.0, gt=0)
    tol: float = Field(default=1e-4, gt=0)
    grid: Optional[list[float]] = None

    @field_validator("map", mode="before")
    @classmethod
    def _coerce_map(cls, v):
        return _map_from_name(v)


class FixpointTask(_Model):
    op: Literal["fixpoint"]
    map: MapCfg
    x0: Any
    lambda_: float = Field(alias="lambda", gt=0)
    tol: float = Field(gt=0)
    max_iter: int = Field(default=1000, ge=1)
    bisection: BisectionCfg = Field(default_factory=BisectionCfg)

    @field_validator("map", mode="before")
    @classmethod
    def _coerce_map(cls, v):
        return _map_from_name(v)


TaskCfg = Annotated[
    Union[CheckTask, MetricTask, PartitionTask, ConvergeTask, ContractTask, FixpointTask],
    Field(discriminator="op"),
]


class OutputCfg(_Model):
    path: Optional[str] = None
    format: Literal["json", "text"] = "json"


class ConfigModel(_Model):
    space: SpaceCfg
    modular: ModularCfg
    task: TaskCfg
    plan: PlanCfg = Field(default_factory=PlanCfg)
    output: OutputCfg = Field(default_factory=OutputCfg)


# --- building runtime objects ---------------------------------------------


@dataclass
class RunConfig:
    model: ConfigModel
    space: PointSpace
    modular: Modular
    plan: SamplingPlan

    @property
    def task(self):
        return self.model.task

    def header(self) -> dict:
        # output location is not part of the computation
        cfg = self.model.model_dump(mode="json", by_alias=True, exclude={"output"})
        digest = hashlib.sha256(dumps(cfg).encode()).hexdigest()
        return {"tool": "modmetric", "version": __version__, "command": self.task.op,
                "config": cfg, "config_hash": digest}


def _format_validation(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"])
        lines.append(f"{loc or '<root>'}: {e['msg']}")
    return "; ".join(lines)


def _build_space(cfg, base_dir: Path) -> PointSpace:
    if cfg.kind == "euclidean":
        return build_euclidean(cfg.dim, cfg.box)
    if cfg.kind == "finite":
        if cfg.path is not None:
            return load_finite_file(base_dir / cfg.path)
        return build_finite(cfg.matrix)
    if cfg.path is not None:
        grid = load_landmass_file(base_dir / cfg.path)
        if cfg.cell_size is not None:
            grid = load_landmass(grid_text(grid), cfg.cell_size)
        return grid
    return load_landmass(cfg.map, cfg.cell_size if cfg.cell_size is not None else 1.0)


def grid_text(grid) -> str:
    return "\n".join("".join("#" if v else "." for v in row) for row in grid.land)


def _build_modular(cfg: ModularCfg, space: PointSpace) -> Modular:
    from .modular import scaled_modular

    if cfg.kind == "table":
        if not isinstance(space, FiniteSpace):
            raise ConfigError("modular.kind: a table modular needs a finite space")
        w = table_modular(space, cfg.lambdas, cfg.values, convex=cfg.convex,
                          strict=cfg.strict, finite=cfg.finite)
    else:
        w = builtin_modular(space, cfg.kind)
    return scaled_modular(w) if cfg.scaled else w


def to_point(space: PointSpace, raw, where: str):
    """Convert a JSON value to a carrier point, or raise ConfigError naming ``where``."""
    if isinstance(space, EuclideanSpace):
        if space.dim == 1 and isinstance(raw, list) and len(raw) == 1:
            raw = raw[0]
        p = raw if space.dim == 1 and not isinstance(raw, list) else (tuple(raw) if isinstance(raw, list) else raw)
        if space.dim == 1 and isinstance(p, (int, float)) and not isinstance(p, bool):
            p = float(p)
        elif isinstance(p, tuple):
            p = tuple(float(c) for c in p)
    elif isinstance(space, FiniteSpace):
        p = raw
    else:
        p = tuple(raw) if isinstance(raw, list) else raw
    if not space.contains(p):
        raise ConfigError(f"{where}: {raw!r} is not a point of the space")
    return p


def build_map(cfg: MapCfg, space: PointSpace) -> SelfMap:
    if cfg.kind == "table":
        if not isinstance(space, FiniteSpace) or cfg.images is None or len(cfg.images) != space.size:
            raise ConfigError("task.map.images: a table map needs one image per point of a finite space")
        images = list(cfg.images)
        for i, v in enumerate(images):
            if not space.contains(v):
                raise ConfigError(f"task.map.images.{i}: {v!r} is not a point of the space")
        return SelfMap(lambda x: images[x], space, "table")
    if not isinstance(space, EuclideanSpace):
        raise ConfigError(f"task.map.kind: map {cfg.kind!r} needs a euclidean space")
    a, b = {"halving": (0.5, 0.0), "shift": (1.0, 1.0), "identity": (1.0, 0.0), "affine": (cfg.a, cfg.b)}[cfg.kind]
    if space.dim == 1:
        return SelfMap(lambda x: a * x + b, space, cfg.kind)
    return SelfMap(lambda x: tuple(a * c + b for c in x), space, cfg.kind)


def _sequence(cfg: SequenceCfg, space: PointSpace) -> SequenceSpec:
    if cfg.kind == "explicit":
        if not cfg.points:
            raise ConfigError("task.sequence.points: an explicit sequence needs points")
        pts = [to_point(space, p, f"task.sequence.points.{i}") for i, p in enumerate(cfg.points)]
        return SequenceSpec(lambda n: pts[n - 1], len(pts), "explicit")
    if not (isinstance(space, EuclideanSpace) and space.dim == 1):
        raise ConfigError(f"task.sequence.kind: {cfg.kind!r} sequences live on the real line")
    gens = {
        "harmonic": lambda n: 1.0 / n,
        "alternating": lambda n: 0.0 if n % 2 else 1.0,
        "linear": lambda n: float(n),
        "constant": lambda n: cfg.value,
        "geometric": lambda n: cfg.ratio ** n,
    }
    return SequenceSpec(gens[cfg.kind], cfg.length, cfg.kind)


def parse_config(document, base_dir=None, overrides: dict | None = None) -> RunConfig:
    """Validate a config (JSON text or dict) and build the space and modular.

    Raises :class:`ConfigError` with field paths for every schema problem.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    document = json.loads(json.dumps(document))
    for key, value in (overrides or {}).items():
        section, _, field = key.partition(".")
        document.setdefault(section, {})
        if not isinstance(document[section], dict):
            raise ConfigError(f"{section}: expected an object")
        document[section][field] = value
    try:
        model = ConfigModel.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None

    base = Path(base_dir) if base_dir is not None else Path.cwd()
    try:
        space = _build_space(model.space, base)
        modular = _build_modular(model.modular, space)
        plan = SamplingPlan(model.plan.seed, model.plan.n_samples, tuple(model.plan.lambda_grid),
                            model.plan.slack_tol)
    except (SpaceError, ValueError, OSError, KeyError) as exc:
        raise ConfigError(f"input error: {exc}") from None
    rc = RunConfig(model, space, modular, plan)
    _validate_task(rc)
    return rc


def _validate_task(rc: RunConfig) -> None:
    """Resolve every point and map in the task now so bad input never reaches computation."""
    t = rc.task
    try:
        if t.op == "metric" and t.pairs is not None:
            for i, (x, y) in enumerate(t.pairs):
                to_point(rc.space, x, f"task.pairs.{i}.0")
                to_point(rc.space, y, f"task.pairs.{i}.1")
        if t.op in ("metric", "converge"):
            BisectionConfig(**t.bisection.model_dump())
        if t.op == "converge":
            _sequence(t.sequence, rc.space).terms(rc.space)
            to_point(rc.space, t.limit, "task.limit")
        if t.op in ("contract", "fixpoint"):
            build_map(t.map, rc.space)
        if t.op == "fixpoint":
            to_point(rc.space, t.x0, "task.x0")
        if t.op == "partition" and rc.space.points is None:
            raise ConfigError("space.kind: partition needs a finite or landmass space")
        grid = getattr(t, "grid", None)
        if grid is not None:
            SamplingPlan(lambda_grid=tuple(grid))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"task: {exc}") from None


# --- dispatch -------------------------------------------------------------


def _run_task(rc: RunConfig, workers: int) -> tuple[bool, dict]:
    t, w, space, plan = rc.task, rc.modular, rc.space, rc.plan

    if t.op == "check":
        reports = [check_property(w, space, p, plan, workers=workers) for p in t.properties]
        return all(r.passed for r in reports), {"reports": reports}

    if t.op == "metric":
        cfg = BisectionConfig(**t.bisection.model_dump())
        pairs = None
        if t.pairs is not None:
            pairs = [(to_point(space, x, "pair"), to_point(space, y, "pair")) for x, y in t.pairs]
        if t.metric == "equivalence":
            rep = check_equivalence_claim(w, space, plan, cfg, pairs=pairs)
            return rep.passed, {"reports": [rep]}
        if pairs is not None:
            values = [{"pair": [x, y], **induced_distance(w, x, y, t.metric, cfg).to_dict()}
                      for x, y in pairs]
            return True, {"metric": t.metric, "values": values}
        rep = check_metric_axioms(t.metric, w, space, plan, cfg)
        return rep.passed, {"reports": [rep]}

    if t.op == "partition":
        grid = tuple(t.grid) if t.grid is not None else plan.lambda_grid
        classes = partition_star(w, space, grid)
        return True, {"classes": classes, "grid": list(grid)}

    if t.op == "converge":
        seq = _sequence(t.sequence, space)
        limit = to_point(space, t.limit, "task.limit")
        grid = tuple(t.grid) if t.grid is not None else plan.lambda_grid
        if t.mode == "convergent":
            v = is_w_convergent(w, seq, limit, grid, t.tol)
            return v.converged, {"verdict": v}
        if t.mode == "cauchy":
            v = is_w_cauchy(w, seq, grid, t.tol)
            return v.converged, {"verdict": v}
        cfg = BisectionConfig(**t.bisection.model_dump())
        rep = check_prop3(w, seq, limit, grid, cfg, t.tol)
        return rep.passed, {"reports": [rep]}

    if t.op == "contract":
        T = build_map(t.map, space)
        if t.mode in ("estimate_plain", "estimate_strong"):
            k = estimate_min_k(w, T, t.lambda0, t.mode.split("_")[1], plan, t.tol)
            return k is not None, {"min_k": k, "tol": t.tol}
        if t.mode == "palais":
            rep = check_palais(space, T, t.k, plan)
        elif t.mode == "theorem":
            grid = tuple(t.grid) if t.grid is not None else plan.lambda_grid
            rep = verify_theorem_conditions(w, T, grid, plan)
        elif t.mode == "fund1":
            rep = check_fund1(w, T, t.k, plan, t.lambda0)
        elif t.mode == "fund2":
            rep = check_fund2(w, T, t.k, plan, t.lambda0)
        else:
            check = verify_strong_contraction if t.mode == "strong" else verify_contraction
            rep = check(w, T, ContractionParams(t.k, t.lambda0), plan)
        return rep.passed, {"reports": [rep]}

    if t.op == "fixpoint":
        T = build_map(t.map, space)
        x0 = to_point(space, t.x0, "task.x0")
        cfg = BisectionConfig(**t.bisection.model_dump())
        sr = solve(w, T, x0, t.lambda_, t.tol, t.max_iter, cfg)
        return sr.converged, {"solve": sr}

    raise ConfigError(f"task.op: unknown operation {t.op!r}")


def run(rc: RunConfig, workers: int = 1) -> tuple[int, dict]:
    """Execute a validated config; returns ``(exit_code, report_document)``."""
    errors = []
    try:
        ok, result = _run_task(rc, workers)
    except (PreconditionError, SamplingError) as exc:
        ok, result = False, {}
        errors.append(f"{type(exc).__name__}: {exc}")
    report = {**rc.header(), "result": jsonable(result), "errors": errors}
    if errors:
        report["status"] = "error"
        code = EXIT_ERROR
    else:
        report["status"] = "pass" if ok else "fail"
        code = EXIT_OK if ok else EXIT_FAIL
    return code, report


def render_text(report: dict) -> str:
    lines = [f"modmetric {report['version']} {report['command']}  config {report['config_hash'][:16]}",
             f"status: {report['status']}"]
    res = report.get("result", {})
    for rep in res.get("reports", []):
        lines.append(f"  {rep['property']}: {rep['status']} ({rep['samples']} samples, "
                     f"{len(rep['violations'])} violations, max_slack {rep['max_slack']})")
        for v in rep["violations"][:5]:
            lines.append(f"    witness {dumps(v['inputs'])}: lhs {v['lhs']} rhs {v['rhs']}")
    for key in ("classes", "min_k", "verdict", "solve", "values"):
        if key in res:
            lines.append(f"  {key}: {dumps(res[key])}")
    for e in report.get("errors", []):
        lines.append(f"  error: {e}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="modmetric", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, help="override plan.seed")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"))
    parser.add_argument("--workers", type=int, default=1, help="threads for property sweeps")
    args = parser.parse_args(argv)

    try:
        path = Path(args.config)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if isinstance(doc, dict) and isinstance(doc.get("task"), dict):
            op = doc["task"].setdefault("op", args.command)
            if op != args.command:
                raise ConfigError(f"task.op: {op!r} does not match command {args.command!r}")
        overrides = {}
        if args.seed is not None:
            overrides["plan.seed"] = args.seed
        if args.out is not None:
            overrides["output.path"] = args.out
        if args.format is not None:
            overrides["output.format"] = args.format
        rc = parse_config(doc, base_dir=path.parent, overrides=overrides)
    except ConfigError as exc:
        print(f"modmetric: {exc}", file=sys.stderr)
        return EXIT_ERROR

    code, report = run(rc, workers=max(1, args.workers))
    out = rc.model.output
    text = render_text(report) if out.format == "text" else dumps(report, indent=2) + "\n"
    if out.path:
        Path(out.path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
