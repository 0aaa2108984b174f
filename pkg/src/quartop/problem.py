"""JSON problem specs: a grid plus u and v, given as samples or closed forms.

Closed forms use a small vocabulary so specs stay portable::

    {"sum": [-5, {"product": [12, {"sech": {"power": 2}}]}]}

Nodes: a bare number, ``{"const": c}``, ``{"x": a}`` (a*x),
``{"sech": {"scale": a, "power": p}}``, ``{"cosh"|"sinh"|"tanh"|"cos"|"sin": a}``
(function of a*x), ``{"chi": a}`` (1/(sqrt2 + cosh(a x))),
``{"sum": [...]}``, ``{"product": [...]}``, ``{"power": [node, p]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import numgrid as ng
from .catalog import JET_ORDER, SQRT2
from .numgrid import Grid, GridFunction
from .operator_core import PotentialPair

# end samples below this are treated as decayed
SNAP_TO_ZERO = 1e-8


class SpecError(ValueError):
    code = "invalid-spec"


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float = -40.0
    x_max: float = 40.0
    n: int = 4001
    periodic: bool = False

    def build(self) -> Grid:
        return Grid(self.x_min, self.x_max, self.n, self.periodic)


class FunctionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["closed_form", "samples"]
    expr: Any = None
    values: list[float] | None = None
    limits: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _payload(self):
        if self.kind == "closed_form" and self.expr is None:
            raise ValueError("closed_form needs 'expr'")
        if self.kind == "samples" and self.values is None:
            raise ValueError("samples needs 'values'")
        return self


class ProblemSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    grid: GridSpec = Field(default_factory=GridSpec)
    u: FunctionSpec
    v: FunctionSpec
    E0: float | None = None
    kappa: float | None = None


_UNARY = {"cosh": ng.cosh, "sinh": ng.sinh, "tanh": ng.tanh, "cos": ng.cos, "sin": ng.sin}


def evaluate(node: Any, x: GridFunction) -> GridFunction:
    """Evaluate a closed-form node on the jet ``x``."""
    if isinstance(node, bool):
        raise SpecError("booleans are not expressions")
    if isinstance(node, (int, float)):
        return 0.0 * x + float(node)
    if not isinstance(node, dict) or len(node) != 1:
        raise SpecError(f"expression nodes are single-key objects, got {node!r}")
    (key, arg), = node.items()
    if key == "const":
        return 0.0 * x + float(arg)
    if key == "x":
        return float(arg) * x
    if key in _UNARY:
        return _UNARY[key](float(arg) * x)
    if key == "chi":
        return 1.0 / (SQRT2 + ng.cosh(float(arg) * x))
    if key == "sech":
        opts = arg if isinstance(arg, dict) else {"scale": arg}
        unknown = set(opts) - {"scale", "power"}
        if unknown:
            raise SpecError(f"unknown sech options {sorted(unknown)}")
        return ng.sech(float(opts.get("scale", 1.0)) * x) ** float(opts.get("power", 1.0))
    if key == "sum":
        terms = [evaluate(t, x) for t in _items(arg)]
        out = terms[0]
        for t in terms[1:]:
            out = out + t
        return out
    if key == "product":
        factors = [evaluate(t, x) for t in _items(arg)]
        out = factors[0]
        for t in factors[1:]:
            out = out * t
        return out
    if key == "power":
        if not isinstance(arg, list) or len(arg) != 2:
            raise SpecError("power takes [node, exponent]")
        return evaluate(arg[0], x) ** float(arg[1])
    raise SpecError(f"unknown expression node {key!r}")


def _items(arg):
    if not isinstance(arg, list) or not arg:
        raise SpecError("sum/product take a non-empty list")
    return arg


def _snap(value: float) -> float:
    return 0.0 if abs(value) < SNAP_TO_ZERO else float(value)


def _function(spec: FunctionSpec, grid: Grid) -> tuple[GridFunction, tuple[float, float]]:
    if spec.kind == "closed_form":
        gf = evaluate(spec.expr, grid.coordinate(JET_ORDER))
    else:
        if len(spec.values) != grid.n:
            raise SpecError(f"expected {grid.n} samples, got {len(spec.values)}")
        gf = GridFunction(grid, np.asarray(spec.values, dtype=float))
    limits = spec.limits or (_snap(gf.values[0]), _snap(gf.values[-1]))
    return gf, (float(limits[0]), float(limits[1]))


def build_problem(spec: ProblemSpec, grid: Grid | None = None) -> PotentialPair:
    grid = grid or spec.grid.build()
    u, ul = _function(spec.u, grid)
    v, vl = _function(spec.v, grid)
    return PotentialPair(u, v, ul[0], ul[1], vl[0], vl[1])


def load_problem(path: str | Path) -> ProblemSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return ProblemSpec.model_validate(raw)
    except ValidationError as exc:
        raise SpecError(f"invalid problem spec: {exc.errors()[0]['msg']}") from exc
