"""Experiment configuration: JSON schema, defaults and normalisation."""

from __future__ import annotations

import copy
import math
from fractions import Fraction

import jsonschema

from ..curvetopo import DEFAULT_WINDOW, TopologyOptions
from .lelong import DEFAULT_QUAD_GRID, DEFAULT_RADIUS

EXPERIMENT_KINDS = ("mean-roots", "tail1d", "tail2d", "lelong", "large-dev", "equidist")
MAX_TOPOLOGY_DEGREE = 12


class ConfigError(ValueError):
    """A configuration that fails the schema or a precondition of its experiment."""


_number_list = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_a_value = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "string", "pattern": r"^\s*\d+(\s*/\s*\d+)?\s*$"}]}

SCHEMA = {
    "type": "object",
    "required": ["kind", "seed"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": list(EXPERIMENT_KINDS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "n": {"enum": [1, 2]},
        "d": {"type": "integer", "minimum": 1},
        "d_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "thresholds": {"type": "array", "minItems": 1},
        "trials": {"type": "integer", "minimum": 1},
        "mode": {"enum": ["affine", "projective"]},
        "topology_opts": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_depth": {"type": "integer", "minimum": 1, "maximum": 30},
                "edge_root_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_attempts": {"type": "integer", "minimum": 1},
                "window": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
            },
        },
        "quadrature_opts": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "quad_grid": {"type": "integer", "minimum": 2},
                "center": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "compare_refined": {"type": "boolean"},
            },
        },
        "equidist_opts": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bands": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "exclusion": {"type": "number", "minimum": 0, "exclusiveMaximum": math.pi / 2},
            },
        },
    },
}

_TOPO = {
    "max_depth": TopologyOptions.max_depth,
    "edge_root_tol": TopologyOptions.edge_root_tol,
    "max_attempts": TopologyOptions.max_attempts,
    "window": list(DEFAULT_WINDOW),
}
_QUAD = {"quad_grid": DEFAULT_QUAD_GRID, "center": [0.0, 1.0], "radius": DEFAULT_RADIUS, "compare_refined": False}

DEFAULTS = {
    "mean-roots": {"n": 1, "d_list": [100], "trials": 20000},
    "tail1d": {"n": 1, "d_list": [100], "thresholds": [1, 1.25, 1.5, 1.75, 2], "trials": 100000},
    "tail2d": {"n": 2, "d_list": [6], "thresholds": ["1/2", 1, 2], "trials": 2000, "mode": "projective", "topology_opts": _TOPO},
    "lelong": {"n": 1, "d_list": [20], "trials": 100, "quadrature_opts": {**_QUAD, "compare_refined": True}},
    "large-dev": {"n": 1, "d_list": [20, 40, 80], "thresholds": [0, 0.005, 0.01, 0.02, 0.05], "trials": 1000, "quadrature_opts": _QUAD},
    "equidist": {"n": 1, "d_list": [200], "trials": 200, "equidist_opts": {"bands": 10, "exclusion": 0.2}},
}

# keys each kind actually reads; anything else is rejected rather than ignored
_USED = {
    "mean-roots": {"n", "d_list", "trials"},
    "tail1d": {"n", "d_list", "thresholds", "trials"},
    "tail2d": {"n", "d_list", "thresholds", "trials", "mode", "topology_opts"},
    "lelong": {"n", "d_list", "trials", "quadrature_opts"},
    "large-dev": {"n", "d_list", "thresholds", "trials", "quadrature_opts"},
    "equidist": {"n", "d_list", "trials", "equidist_opts"},
}


def default_config(kind: str) -> dict:
    if kind not in DEFAULTS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    return copy.deepcopy(DEFAULTS[kind])


def normalize_config(raw: dict) -> dict:
    """Validate ``raw``, fill defaults and return the canonical form (``d`` folded into ``d_list``)."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    kind = raw["kind"]
    cfg = default_config(kind)
    extra = set(raw) - _USED[kind] - {"kind", "seed", "d"}
    if extra:
        raise ConfigError(f"keys not used by {kind}: {', '.join(sorted(extra))}")
    if "d" in raw and "d_list" in raw:
        raise ConfigError("give either d or d_list, not both")
    for key, value in raw.items():
        if key in ("kind", "seed"):
            continue
        if key == "d":
            cfg["d_list"] = [value]
        elif isinstance(value, dict):
            cfg[key] = {**cfg[key], **value}
        else:
            cfg[key] = copy.deepcopy(value)
    cfg = {"kind": kind, "seed": raw["seed"], **cfg}
    _check_preconditions(cfg)
    return cfg


def parse_a_value(a) -> Fraction:
    try:
        return Fraction(str(a).replace(" ", "")) if isinstance(a, str) else Fraction(a)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad a-value {a!r}") from None


def _check_preconditions(cfg: dict) -> None:
    kind = cfg["kind"]
    n_expected = 2 if kind == "tail2d" else 1
    if cfg["n"] != n_expected:
        raise ConfigError(f"{kind} works with n = {n_expected}")
    ds = cfg["d_list"]
    if len(set(ds)) != len(ds):
        raise ConfigError("d_list has repeated degrees")
    trials = cfg["trials"]
    if kind == "mean-roots" and trials < 100:
        raise ConfigError("mean-roots needs trials >= 100")
    if kind == "equidist" and min(ds) < 50:
        raise ConfigError("equidist needs d >= 50")
    if kind == "tail2d" and max(ds) > MAX_TOPOLOGY_DEGREE:
        raise ConfigError(f"tail2d supports d <= {MAX_TOPOLOGY_DEGREE}")
    if kind in ("tail1d", "large-dev"):
        th = cfg["thresholds"]
        if not all(isinstance(t, (int, float)) and not isinstance(t, bool) and t >= 0 for t in th):
            raise ConfigError("thresholds must be non-negative numbers")
        if sorted(th) != th or len(set(th)) != len(th):
            raise ConfigError("thresholds must be strictly increasing")
        if kind == "tail1d":
            for d in ds:
                bad = [e for e in th if e != 0 and e * math.sqrt(d) < 1]
                if bad:
                    raise ConfigError(f"eps * sqrt(d) < 1 for d={d}, eps={bad}")
    if kind == "tail2d":
        for a in cfg["thresholds"]:
            if isinstance(a, bool) or parse_a_value(a) <= 0:
                raise ConfigError(f"a-values must be positive, got {a!r}")
        x0, x1, y0, y1 = cfg["topology_opts"]["window"]
        if not (x0 < x1 and y0 < y1):
            raise ConfigError("topology window must have x0 < x1 and y0 < y1")
    if kind in ("lelong", "large-dev"):
        q = cfg["quadrature_opts"]
        if not abs(q["center"][1]) > q["radius"]:
            raise ConfigError("cutoff support must stay off the real axis (|Im center| > radius)")
