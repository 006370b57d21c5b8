"""Scenario files: JSON schema, validation and object construction.

A scenario names a grid, spacetimes, regions and (optionally) pairs, picks
one command and its parameters, and fixes tolerances and a seed so that
reruns are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import jsonschema

from . import geometry
from .distal import build_radial_bump, distal_metric, inflation_profile, radial_diffeo
from .errors import ScenarioError
from .grid import SpatialGrid
from .pairs import CauchyPair, linear_map
from .regions import Region, annulus, ball, box, union_of

COMMANDS = (
    "develop",
    "ball",
    "verify-lightspeed",
    "verify-step",
    "interpolate",
    "verify-theorem-chain",
    "distal-metric",
    "splitcalc",
)

_SHAPE_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "shape": {"const": "ball"},
                "center": {"type": "array", "items": {"type": "number"}},
                "radius": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["shape", "center", "radius"],
        },
        {
            "properties": {
                "shape": {"const": "box"},
                "lo": {"type": "array", "items": {"type": "number"}},
                "hi": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["shape", "lo", "hi"],
        },
        {
            "properties": {
                "shape": {"const": "annulus"},
                "center": {"type": "array", "items": {"type": "number"}},
                "r_inner": {"type": "number", "minimum": 0},
                "r_outer": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["shape", "center", "r_inner", "r_outer"],
        },
        {
            "properties": {
                "shape": {"const": "union"},
                "of": {"type": "array", "minItems": 1},
            },
            "required": ["shape", "of"],
        },
    ],
}

_FSPEC_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "kind": {"const": "linear"},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "center": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["kind", "scale"],
        },
        {
            "properties": {
                "kind": {"const": "radial-bump"},
                "rstar": {"type": "number", "exclusiveMinimum": 0},
                "rho1": {"type": "number", "exclusiveMinimum": 0},
                "rho2": {"type": "number", "exclusiveMinimum": 0},
                "support": {"type": "number", "exclusiveMinimum": 0},
                "center": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["kind", "rstar", "rho1", "rho2", "support"],
        },
    ],
}

_SPACETIME_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["minkowski", "ultrastatic", "expression", "distal"]},
        "k_scale": {"type": "number", "exclusiveMinimum": 0},
        "beta": {"type": "string"},
        "h": {},
        "f": _FSPEC_SCHEMA,
        "c": {},
        "t_inflation": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {
            "type": "object",
            "properties": {
                "dim": {"enum": [1, 2]},
                "cells": {"type": "integer", "minimum": 16},
                "period": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["dim", "cells", "period"],
        },
        "spacetimes": {"type": "object", "additionalProperties": _SPACETIME_SCHEMA},
        "regions": {"type": "object", "additionalProperties": _SHAPE_SCHEMA},
        "pairs": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "t": {"type": "number"},
                    "S": {"type": "string"},
                    "T": {"type": "string"},
                },
                "required": ["t", "S", "T"],
            },
        },
        "command": {"enum": list(COMMANDS)},
        "params": {"type": "object"},
        "tolerances": {"type": "object"},
        "output": {
            "type": "object",
            "properties": {"contours": {"type": "boolean"}},
        },
    },
    "required": ["name", "grid", "command"],
}

_REQUIRED_PARAMS = {
    "develop": ["spacetime", "region", "t0", "horizon"],
    "ball": ["spacetime", "region", "t", "delta"],
    "verify-lightspeed": ["spacetime", "region", "delta", "tstar"],
    "verify-step": ["spacetime", "S2", "S1", "T1", "T2", "tstar"],
    "interpolate": ["M1", "M2", "times"],
    "verify-theorem-chain": ["M", "N", "mode"],
    "distal-metric": ["f", "t_inflation"],
    "splitcalc": ["radii", "seed_bounds", "rules"],
}


@dataclass
class Scenario:
    raw: dict
    grid: SpatialGrid
    spacetimes: dict
    regions: dict
    pairs: list
    command: str
    params: dict
    tolerances: dict
    seed: int
    name: str

    @property
    def hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()
        ).hexdigest()[:16]


def _build_region(grid, spec) -> Region:
    kind = spec["shape"]
    if kind == "ball":
        return ball(grid, spec["center"], spec["radius"])
    if kind == "box":
        return box(grid, spec["lo"], spec["hi"])
    if kind == "annulus":
        return annulus(grid, spec["center"], spec["r_inner"], spec["r_outer"])
    if kind == "union":
        return union_of([_build_region(grid, s) for s in spec["of"]])
    raise ScenarioError(f"unknown shape {kind!r}")


def build_morphism(fspec, c=1.0, period=None):
    center = fspec.get("center")
    if fspec["kind"] == "linear":
        return linear_map(fspec["scale"], c=c, center=center, period=period)
    bump = build_radial_bump(fspec["rstar"], fspec["rho1"], fspec["rho2"], fspec["support"])
    return radial_diffeo(bump, c=c, center=center, period=period)


def _build_spacetime(grid, spec):
    kind = spec["kind"]
    if kind == "minkowski":
        return geometry.minkowski(grid)
    if kind == "ultrastatic":
        return geometry.ultrastatic(grid, spec.get("k_scale", 1.0))
    if kind == "expression":
        if "beta" not in spec or "h" not in spec:
            raise ScenarioError("expression spacetime needs 'beta' and 'h'")
        return geometry.from_expressions(grid, spec["beta"], spec["h"])
    if kind == "distal":
        f = build_morphism(spec["f"], period=grid.period if spec["f"].get("center") else None)
        c = spec.get("c", "auto")
        if c == "auto":
            c = f.c_max
        return distal_metric(grid, f, inflation_profile(spec.get("t_inflation", 1.0)), float(c))
    raise ScenarioError(f"unknown spacetime kind {kind!r}")


def validate(doc: dict) -> list:
    """Schema plus semantic validation; returns a list of problem strings."""
    problems = []
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as e:
        return [f"schema: {e.message} at /{'/'.join(str(p) for p in e.absolute_path)}"]

    cmd = doc["command"]
    params = doc.get("params", {})
    for key in _REQUIRED_PARAMS[cmd]:
        if key not in params:
            problems.append(f"command {cmd!r} requires params.{key}")

    def _numbers(key, n):
        v = params.get(key)
        if v is None:
            return
        ok = isinstance(v, list) and len(v) == n and all(
            isinstance(e, (int, float)) for e in v
        )
        if not ok:
            problems.append(f"params.{key} must be a list of {n} numbers")

    _numbers("horizon", 2)
    _numbers("times", 4)

    names_st = set(doc.get("spacetimes", {}))
    names_rg = set(doc.get("regions", {}))
    for key in ("spacetime", "M", "N", "M1", "M2"):
        v = params.get(key)
        if isinstance(v, str) and v not in names_st:
            problems.append(f"params.{key} references unknown spacetime {v!r}")
    for key in ("region", "S2", "S1", "T1", "T2"):
        v = params.get(key)
        if isinstance(v, str) and v not in names_rg:
            problems.append(f"params.{key} references unknown region {v!r}")
    for i, p in enumerate(doc.get("pairs", [])):
        for key in ("S", "T"):
            if p[key] not in names_rg:
                problems.append(f"pairs[{i}].{key} references unknown region {p[key]!r}")
    if cmd == "verify-theorem-chain" and not doc.get("pairs"):
        problems.append("verify-theorem-chain needs at least one entry in 'pairs'")
    return problems


def load(path) -> Scenario:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"not valid JSON: {e}") from e
    return from_dict(doc)


def from_dict(doc: dict) -> Scenario:
    problems = validate(doc)
    if problems:
        raise ScenarioError("; ".join(problems))
    g = doc["grid"]
    grid = SpatialGrid(g["dim"], g["cells"], g["period"])
    spacetimes = {n: _build_spacetime(grid, s) for n, s in doc.get("spacetimes", {}).items()}
    regions = {n: _build_region(grid, s) for n, s in doc.get("regions", {}).items()}
    pairs = [
        CauchyPair(p["t"], regions[p["S"]], regions[p["T"]]) for p in doc.get("pairs", [])
    ]
    return Scenario(
        raw=doc,
        grid=grid,
        spacetimes=spacetimes,
        regions=regions,
        pairs=pairs,
        command=doc["command"],
        params=doc.get("params", {}),
        tolerances=doc.get("tolerances", {}),
        seed=int(doc.get("seed", 0)),
        name=doc["name"],
    )
