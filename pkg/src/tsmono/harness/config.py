"""Scenario files: loading, validation with field paths, and normalization."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from tsmono import exprlang
from tsmono.calculus import TOL_QUAD
from tsmono.errors import ConfigInvalid, TimeScaleError
from tsmono.monotonicity.verdict import DIRECTIONS, TOL_MONO
from tsmono.timescale import TimeScale

UPPER_LIMIT = ("thm1-1", "nabla1-1", "diamond")
DAMPED = ("thm1-2", "nabla1-2")
TWO_DAMPERS = ("thm1-3", "nabla1-3")

# required fields per theorem id; "direction" is optional only for thm2-4
REQUIRED = {
    "thm1-1": ("scale", "psi", "phi", "a", "b", "direction"),
    "nabla1-1": ("scale", "psi", "phi", "a", "b", "direction"),
    "diamond": ("scale", "psi", "phi", "a", "b", "direction", "alpha_weight"),
    "thm1-2": ("scale", "psi", "phi", "a", "b", "direction", "damper"),
    "nabla1-2": ("scale", "psi", "phi", "a", "b", "direction", "damper"),
    "thm1-3": ("scale", "psi", "phi", "a", "b", "direction", "dampers"),
    "nabla1-3": ("scale", "psi", "phi", "a", "b", "direction", "dampers"),
    "prop-c1": ("scale", "Psi", "Phi", "a", "b", "s_grid", "direction"),
    "prop-damped": ("scale", "Psi", "Phi", "a", "b", "s_grid", "direction", "damper"),
    "thm2-1": ("scale", "psi", "phi", "a", "b", "s_grid", "direction"),
    "thm2-1-damped": ("scale", "psi", "phi", "a", "b", "s_grid", "direction", "damper"),
    "thm2-3": ("factors", "s_grid", "direction"),
    "thm2-4": ("scale", "psi", "phi", "kernel", "a", "b", "s_grid"),
    "thm2-5": ("factors", "s_grid", "direction"),
    "thm2-6": ("scale", "s0", "max_order", "coeff_psi", "coeff_phi", "direction"),
    "con-search": ("generator", "trials"),
}
THEOREMS = tuple(REQUIRED)

KNOWN = {
    "theorem", "description", "scale", "psi", "phi", "a", "b", "direction", "strictness",
    "resolution", "alpha_weight", "damper", "dampers", "Psi", "Phi", "kernel", "factors",
    "s_grid", "coeff_psi", "coeff_phi", "u0", "s0", "max_order", "tolerances", "seed",
    "force_sample", "generator", "trials", "orders",
}
FACTOR_KNOWN = {"scale", "psi", "phi", "a", "b", "kernel"}


@dataclass
class ScenarioConfig:
    """A validated scenario.  ``raw`` keeps the document as written for echoing."""

    theorem: str
    raw: dict
    direction: Optional[str] = None
    strictness: str = "weak"
    resolution: float = 0.1
    scale: Optional[TimeScale] = None
    psi: Optional[str] = None
    phi: Optional[str] = None
    a: Optional[float] = None
    b: Optional[float] = None
    alpha_weight: Optional[float] = None
    damper: Optional[str] = None
    dampers: Optional[list] = None
    Psi: Optional[str] = None
    Phi: Optional[str] = None
    kernel: Optional[str] = None
    factors: list = field(default_factory=list)
    s_grid: Optional[list] = None
    coeff_psi: Optional[list] = None
    coeff_phi: Optional[list] = None
    u0: int = 0
    s0: Optional[float] = None
    max_order: Optional[int] = None
    tol_mono: float = TOL_MONO
    tol_quad: float = TOL_QUAD
    seed: Optional[int] = None
    force_sample: bool = False
    generator: Optional[str] = None
    trials: Optional[int] = None
    orders: int = 6

    @classmethod
    def from_dict(cls, doc: Any) -> "ScenarioConfig":
        return _validate(doc)


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid("<document>", f"not valid YAML: {exc}") from None
    return _validate(doc)


# -- field helpers -------------------------------------------------------------

def _number(doc, key, path=None):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigInvalid(path or key, f"expected a number, got {v!r}")
    return float(v)


def _int(doc, key, path=None, minimum=None):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigInvalid(path or key, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigInvalid(path or key, f"must be >= {minimum}, got {v}")
    return v


def _expr(doc, key, variables, path=None):
    v = doc[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = repr(float(v))
    if not isinstance(v, str):
        raise ConfigInvalid(path or key, f"expected an expression string, got {v!r}")
    try:
        exprlang.parse(v, variables)
    except (exprlang.ExprSyntaxError, exprlang.UnknownIdentifier) as exc:
        raise ConfigInvalid(path or key, str(exc)) from None
    return v


def _scale(spec, path):
    try:
        return TimeScale.from_dict(spec)
    except KeyError as exc:
        raise ConfigInvalid(f"{path}.{exc.args[0]}", "missing field") from None
    except (TimeScaleError, TypeError, ValueError) as exc:
        raise ConfigInvalid(path, str(exc)) from None


def _point(scale, doc, key, path=None):
    x = _number(doc, key, path)
    if not scale.contains(x):
        raise ConfigInvalid(path or key, f"{x!r} is not a point of the time scale")
    return x


def _number_list(v, path, positive=False):
    if not isinstance(v, list) or not v:
        raise ConfigInvalid(path, "expected a non-empty list of numbers")
    out = []
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigInvalid(f"{path}[{i}]", f"expected a number, got {x!r}")
        if positive and not x > 0:
            raise ConfigInvalid(f"{path}[{i}]", f"must be > 0, got {x!r}")
        out.append(float(x))
    return out


def _s_grid(v):
    if isinstance(v, dict):
        for k in ("start", "stop", "count"):
            if k not in v:
                raise ConfigInvalid(f"s_grid.{k}", "missing field")
        count = _int(v, "count", "s_grid.count", minimum=2)
        start, stop = _number(v, "start", "s_grid.start"), _number(v, "stop", "s_grid.stop")
        if not stop > start:
            raise ConfigInvalid("s_grid.stop", "must exceed s_grid.start")
        return [float(x) for x in np.linspace(start, stop, count)]
    grid = _number_list(v, "s_grid")
    if len(grid) < 2:
        raise ConfigInvalid("s_grid", "needs at least 2 values")
    if any(y <= x for x, y in zip(grid, grid[1:])):
        raise ConfigInvalid("s_grid", "values must be strictly increasing")
    return grid


def _damper_spec(v, path):
    if isinstance(v, dict):
        extra = set(v) - {"blend", "coef"}
        if extra:
            raise ConfigInvalid(f"{path}.{sorted(extra)[0]}", "unknown field")
        if "blend" not in v:
            raise ConfigInvalid(f"{path}.blend", "missing field")
        lam = _number(v, "blend", f"{path}.blend")
        if not 0.0 <= lam <= 1.0:
            raise ConfigInvalid(f"{path}.blend", "must lie in [0, 1]")
        coef = _number(v, "coef", f"{path}.coef") if "coef" in v else 1.0
        if not coef > 0:
            raise ConfigInvalid(f"{path}.coef", "must be > 0")
        return {"blend": lam, "coef": coef}
    return _expr({"x": v}, "x", ("s",), path)


# -- validation ----------------------------------------------------------------

def _validate(doc: Any) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigInvalid("<document>", "expected a mapping at the top level")
    raw = copy.deepcopy(doc)
    for key in doc:
        if key not in KNOWN:
            raise ConfigInvalid(str(key), "unknown field")
    if "theorem" not in doc:
        raise ConfigInvalid("theorem", "missing field")
    theorem = doc["theorem"]
    if theorem not in REQUIRED:
        raise ConfigInvalid("theorem", f"unknown theorem id {theorem!r}; expected one of {', '.join(THEOREMS)}")
    for key in REQUIRED[theorem]:
        if key not in doc:
            raise ConfigInvalid(key, f"missing field (required by {theorem})")
    cfg = ScenarioConfig(theorem=theorem, raw=raw)

    if "direction" in doc:
        if doc["direction"] not in DIRECTIONS:
            raise ConfigInvalid("direction", f"expected one of {DIRECTIONS}, got {doc['direction']!r}")
        cfg.direction = doc["direction"]
    if "strictness" in doc:
        if doc["strictness"] not in ("weak", "strict"):
            raise ConfigInvalid("strictness", "expected 'weak' or 'strict'")
        cfg.strictness = doc["strictness"]
    if "resolution" in doc:
        cfg.resolution = _number(doc, "resolution")
        if not cfg.resolution > 0:
            raise ConfigInvalid("resolution", "must be > 0")
    if "force_sample" in doc:
        if not isinstance(doc["force_sample"], bool):
            raise ConfigInvalid("force_sample", "expected true or false")
        cfg.force_sample = doc["force_sample"]
    if "seed" in doc:
        cfg.seed = _int(doc, "seed")
    if "tolerances" in doc:
        tols = doc["tolerances"]
        if not isinstance(tols, dict):
            raise ConfigInvalid("tolerances", "expected a mapping")
        for k in tols:
            if k not in ("tol_mono", "tol_quad"):
                raise ConfigInvalid(f"tolerances.{k}", "unknown field")
            val = _number(tols, k, f"tolerances.{k}")
            if not val > 0:
                raise ConfigInvalid(f"tolerances.{k}", "must be > 0")
            setattr(cfg, k, val)

    if theorem == "con-search":
        if not isinstance(doc["generator"], str):
            raise ConfigInvalid("generator", "expected a generator spec string")
        cfg.generator = doc["generator"]
        cfg.trials = _int(doc, "trials", minimum=1)
        if "orders" in doc:
            cfg.orders = _int(doc, "orders", minimum=0)
        return cfg

    if "scale" in doc:
        cfg.scale = _scale(doc["scale"], "scale")
    fn_vars = ("u",)
    kernel_vars = ("s", "u")
    for key in ("psi", "phi"):
        if key in doc:
            setattr(cfg, key, _expr(doc, key, fn_vars))
    for key in ("Psi", "Phi", "kernel"):
        if key in doc:
            setattr(cfg, key, _expr(doc, key, kernel_vars))
    if cfg.scale is not None:
        for key in ("a", "b"):
            if key in doc:
                setattr(cfg, key, _point(cfg.scale, doc, key))
        if cfg.a is not None and cfg.b is not None and not cfg.b > cfg.a:
            raise ConfigInvalid("b", "must exceed a")
    if "alpha_weight" in doc:
        cfg.alpha_weight = _number(doc, "alpha_weight")
        if not 0.0 <= cfg.alpha_weight <= 1.0:
            raise ConfigInvalid("alpha_weight", "must lie in [0, 1]")
    if "damper" in doc:
        cfg.damper = _expr(doc, "damper", ("s",))
    if "dampers" in doc:
        ds = doc["dampers"]
        if not isinstance(ds, list) or len(ds) != 2:
            raise ConfigInvalid("dampers", "expected a list of two dampers [T1, T2]")
        cfg.dampers = [_damper_spec(d, f"dampers[{i}]") for i, d in enumerate(ds)]
    if "s_grid" in doc:
        cfg.s_grid = _s_grid(doc["s_grid"])
    if "factors" in doc:
        cfg.factors = _factors(doc["factors"], theorem)
    if theorem == "thm2-6":
        cfg.max_order = _int(doc, "max_order", minimum=0)
        cfg.u0 = _int(doc, "u0", minimum=0) if "u0" in doc else 0
        cfg.s0 = _point(cfg.scale, doc, "s0")
        cfg.coeff_psi = _number_list(doc["coeff_psi"], "coeff_psi")
        cfg.coeff_phi = _number_list(doc["coeff_phi"], "coeff_phi")
        if len(cfg.coeff_psi) != len(cfg.coeff_phi):
            raise ConfigInvalid("coeff_phi", "must have the same length as coeff_psi")
    return cfg


def _factors(v, theorem):
    if not isinstance(v, list) or not v:
        raise ConfigInvalid("factors", "expected a non-empty list")
    out = []
    for i, item in enumerate(v):
        path = f"factors[{i}]"
        if not isinstance(item, dict):
            raise ConfigInvalid(path, "expected a mapping")
        for k in item:
            if k not in FACTOR_KNOWN:
                raise ConfigInvalid(f"{path}.{k}", "unknown field")
        need = ("scale", "psi", "phi", "a", "b") + (("kernel",) if theorem == "thm2-5" else ())
        for k in need:
            if k not in item:
                raise ConfigInvalid(f"{path}.{k}", "missing field")
        scale = _scale(item["scale"], f"{path}.scale")
        f = {
            "scale": scale,
            "psi": _expr(item, "psi", ("u",), f"{path}.psi"),
            "phi": _expr(item, "phi", ("u",), f"{path}.phi"),
            "a": _point(scale, item, "a", f"{path}.a"),
            "b": _point(scale, item, "b", f"{path}.b"),
            "kernel": _expr(item, "kernel", ("s", "u"), f"{path}.kernel") if "kernel" in item else None,
        }
        if not f["b"] > f["a"]:
            raise ConfigInvalid(f"{path}.b", "must exceed a")
        out.append(f)
    return out
