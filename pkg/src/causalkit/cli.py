"""Scenario-driven command line runner.

    causalkit run <scenario.json> [--out DIR] [--grid N] [--seed S] [--quiet]
    causalkit validate <scenario.json>
    causalkit list-builtins

Each run writes ``<name>-report.json`` (per-check pass/fail, margins,
certificates, scenario hash, grid, seed, library version) and, when asked,
``<name>-contours.csv`` with header ``slice_t,poly_id,x,y``.  Exit status 0
iff every check passed, 2 on schema violations, 3 on numerical aborts.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, geometry
from .causal import CFL_NUMBER, develop
from .deform import InterpolationTimes, interpolate, verify_interpolation, verify_theorem_chain
from .distal import (
    DistanceModel,
    apply_ball_dilation,
    apply_diffeo_bound,
    apply_easydistal,
    apply_scaling,
    apply_scaling_fill,
    bisection_iterate,
    bisection_refine,
    cone_certificate,
    drive_all_below,
    inflation_profile,
)
from .errors import CausalkitError, CFLError, ScenarioError
from .pairs import step_pairs, verify_lightspeed
from .regions import contour_polylines, hausdorff, ball as ball_region, optical_ball
from .scenario import COMMANDS, Scenario, build_morphism, load, validate as validate_doc


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isinf(obj):
            return None
        if math.isnan(obj):
            return None
    return obj


def _write_contours(path, labelled_regions):
    lines = ["slice_t,poly_id,x,y"]
    poly_id = 0
    for t, region in labelled_regions:
        for line in contour_polylines(region):
            for vtx in line:
                lines.append(f"{t},{poly_id},{float(vtx[0])!r},{float(vtx[1])!r}")
            poly_id += 1
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# command implementations: each returns (checks, payload, contour regions)
# ---------------------------------------------------------------------------


def _cmd_develop(sc: Scenario):
    p = sc.params
    M = sc.spacetimes[p["spacetime"]]
    U = sc.regions[p["region"]]
    D = develop(M, p["t0"], U, tuple(p["horizon"]))
    checks = []
    oracle = p.get("oracle")
    check_times = p.get("check_times", [])
    contours = []
    for t in check_times:
        s = D.slice(t)
        contours.append((t, s))
        if oracle and oracle.get("kind") == "cone-ball":
            r = oracle["radius"] - oracle.get("speed", 1.0) * abs(t - p["t0"])
            if r > 0 and s.interior_nonempty():
                ref = ball_region(sc.grid, oracle["center"], r)
                err = hausdorff(s, ref)
                tol = sc.tolerances.get("hausdorff_cells", 2.0) * sc.grid.spacing
                checks.append(
                    {
                        "check": f"slice({t}) vs analytic ball {r:.6g}",
                        "hausdorff": err,
                        "tol": tol,
                        "ok": err <= tol,
                    }
                )
            else:
                checks.append(
                    {
                        "check": f"slice({t}) empty as analytic cone closed",
                        "ok": not s.interior_nonempty(),
                    }
                )
    return checks, {"development": D.summary()}, contours


def _cmd_ball(sc: Scenario):
    p = sc.params
    M = sc.spacetimes[p["spacetime"]]
    U = sc.regions[p["region"]]
    B = optical_ball(M, p["t"], U, p["delta"])
    checks = []
    if "oracle_radius" in p:
        ref = ball_region(sc.grid, p.get("oracle_center", [0.0] * sc.grid.dim), p["oracle_radius"])
        err = hausdorff(B, ref)
        tol = sc.tolerances.get("hausdorff_cells", 2.0) * sc.grid.spacing
        checks.append({"check": "optical ball vs analytic", "hausdorff": err, "tol": tol, "ok": err <= tol})
    return checks, {"area": B.area()}, [(p["t"], B)]


def _cmd_verify_lightspeed(sc: Scenario):
    p = sc.params
    M = sc.spacetimes[p["spacetime"]]
    T = sc.regions[p["region"]]
    rep = verify_lightspeed(
        M,
        T,
        p["delta"],
        p["tstar"],
        samples=p.get("samples", 20),
        margin=sc.tolerances.get("margin_cells", 2.0),
        seed=sc.seed,
    )
    return rep.checks, {"report": rep.as_dict()}, []


def _cmd_verify_step(sc: Scenario):
    p = sc.params
    M = sc.spacetimes[p["spacetime"]]
    chain = tuple(sc.regions[p[k]] for k in ("S2", "S1", "T1", "T2"))
    cert = step_pairs(
        M,
        chain,
        p["tstar"],
        validate=p.get("validate", 2),
        margin=sc.tolerances.get("margin_cells", 2.0),
    )
    return cert.checks, {"certificate": cert.as_dict()}, []


def _cmd_interpolate(sc: Scenario):
    p = sc.params
    M1 = sc.spacetimes[p["M1"]]
    M2 = sc.spacetimes[p["M2"]]
    times = InterpolationTimes(*p["times"])
    g = interpolate(M1, M2, times)
    rep = verify_interpolation(
        g,
        M1,
        M2,
        times,
        samples=p.get("samples", 200),
        endpoint_rtol=sc.tolerances.get("endpoint_rtol", 1e-12),
        cone_tol=sc.tolerances.get("cone_tol", geometry.DEFAULT_CONE_TOL),
        seed=sc.seed,
    )
    checks = [{"check": "interpolation construction", "ok": rep.passed, **rep.as_dict()}]
    return checks, {"report": rep.as_dict()}, []


def _cmd_theorem_chain(sc: Scenario):
    p = sc.params
    rep = verify_theorem_chain(
        sc.spacetimes[p["M"]],
        sc.spacetimes[p["N"]],
        sc.pairs,
        mode=p["mode"],
        margin=sc.tolerances.get("margin_cells", 2.0),
    )
    return rep.checks, {"report": rep.as_dict()}, []


def _cmd_distal_metric(sc: Scenario):
    p = sc.params
    f = build_morphism(p["f"], period=sc.grid.period if p["f"].get("center") else None)
    c = p.get("c", "auto")
    c = f.c_max if c == "auto" else float(c)
    phi = inflation_profile(p["t_inflation"])
    cert = cone_certificate(
        sc.grid, f, phi, c, samples=p.get("samples", 10_000), seed=sc.seed
    )
    tol = sc.tolerances.get("cone_tol", 1e-10)
    checks = [
        {
            "check": "optical form dominates the flat one",
            "min_eig": cert["min_eig_kg_minus_identity"],
            "tol": tol,
            "ok": cert["min_eig_kg_minus_identity"] >= -tol,
        }
    ]
    return checks, {"certificate": cert, "c": c, "c_max": f.c_max}, []


def _cmd_splitcalc(sc: Scenario):
    p = sc.params
    radii = p["radii"]
    if isinstance(radii, dict):
        radii = np.linspace(radii["start"], radii["stop"], radii["num"]).tolist()
    model = DistanceModel.with_seed(radii, {float(k): v for k, v in p["seed_bounds"].items()})
    checks = []
    results = []
    for rule in p["rules"]:
        kind = rule["rule"]
        if kind == "ball-dilation":
            apply_ball_dilation(model)
            results.append({"rule": kind})
        elif kind == "easydistal":
            b = apply_easydistal(model, rule["diam"])
            results.append({"rule": kind, "bound": None if math.isinf(b) else b})
        elif kind == "scaling":
            v = apply_scaling(model, rule["to_radius"], rule["from_radius"])
            results.append({"rule": kind, "bound": v})
        elif kind == "scaling-fill":
            apply_scaling_fill(model)
            results.append({"rule": kind})
        elif kind == "bisect":
            v = bisection_refine(model, rule["r"], rule["eps"], rule["k"])
            results.append({"rule": kind, "bound": v})
        elif kind == "bisect-iterate":
            it = bisection_iterate(
                model,
                rule["r"],
                rule.get("k", 5),
                rule["target"],
                max_iter=rule.get("max_iter", 40),
            )
            v = model.bound_at(rule["r"])
            results.append({"rule": kind, "iterations": it, "bound": v})
            checks.append(
                {
                    "check": f"bisection drove dbar({rule['r']}) below {rule['target']}",
                    "bound": v,
                    "iterations": it,
                    "ok": v < rule["target"],
                }
            )
        elif kind == "drive-below":
            ok = drive_all_below(model, rule["target"], k=rule.get("k", 5))
            checks.append({"check": f"all radii below {rule['target']}", "ok": ok})
            results.append({"rule": kind})
        elif kind == "diffeo":
            f = build_morphism(
                rule["f"], period=sc.grid.period if rule["f"].get("center") else None
            )
            S = sc.regions[rule["region"]]
            out = apply_diffeo_bound(
                model,
                f,
                S,
                rule["eps"],
                rule["r"],
                fS_radius=rule.get("fS_radius"),
                update_radius=rule.get("update_radius"),
            )
            results.append(
                {"rule": kind, "rho_bound": out.rho_bound, "kappa": out.kappa,
                 "kappa_bound": None if math.isinf(out.kappa_bound) else out.kappa_bound}
            )
        else:
            raise ScenarioError(f"unknown splitcalc rule {kind!r}")
    if "target" in p:
        final = [None if math.isinf(v) else float(v) for v in model.dbar]
        ok = all(v is not None and v < p["target"] for v in final)
        checks.append({"check": f"final bounds below {p['target']}", "ok": ok})
    payload = {"model": model.as_dict(), "rule_results": results, "provenance": model.log}
    return checks, payload, []


_DISPATCH = {
    "develop": _cmd_develop,
    "ball": _cmd_ball,
    "verify-lightspeed": _cmd_verify_lightspeed,
    "verify-step": _cmd_verify_step,
    "interpolate": _cmd_interpolate,
    "verify-theorem-chain": _cmd_theorem_chain,
    "distal-metric": _cmd_distal_metric,
    "splitcalc": _cmd_splitcalc,
}


def run_scenario(sc: Scenario, out_dir: Path, quiet: bool = False) -> int:
    checks, payload, contours = _DISPATCH[sc.command](sc)
    passed = all(c.get("ok", True) for c in checks)
    report = {
        "name": sc.name,
        "command": sc.command,
        "version": __version__,
        "scenario_hash": sc.hash,
        "grid": {"dim": sc.grid.dim, "cells": sc.grid.cells, "period": sc.grid.period},
        "cfl": CFL_NUMBER,
        "seed": sc.seed,
        "passed": passed,
        "checks": checks,
        **payload,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{sc.name}-report.json"
    report_path.write_text(json.dumps(_json_safe(report), indent=2, sort_keys=True) + "\n")
    if contours and sc.raw.get("output", {}).get("contours", False):
        _write_contours(out_dir / f"{sc.name}-contours.csv", contours)
    if sc.command == "splitcalc":
        prov = out_dir / f"{sc.name}-provenance.jsonl"
        prov.write_text(
            "\n".join(json.dumps(_json_safe(e), sort_keys=True) for e in payload["provenance"])
            + "\n"
        )
    if not quiet:
        for c in checks:
            status = "PASS" if c.get("ok", True) else "FAIL"
            print(f"[{status}] {c.get('check', c.get('ordering', 'check'))}")
        print(f"report: {report_path}")
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="causalkit", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--grid", type=int, default=None, help="override cells per axis")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--quiet", action="store_true")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario")

    sub.add_parser("list-builtins", help="list builtin spacetimes, shapes and commands")

    args = parser.parse_args(argv)

    if args.cmd == "list-builtins":
        print("spacetimes: minkowski | ultrastatic(k_scale) | expression(beta, h) | distal(f, c, t_inflation)")
        print("regions:    ball | box | annulus | union")
        print("commands:   " + " | ".join(COMMANDS))
        return 0

    if args.cmd == "validate":
        try:
            with open(args.scenario) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        problems = validate_doc(doc)
        if problems:
            for pr in problems:
                print(f"invalid: {pr}", file=sys.stderr)
            return 2
        print("ok")
        return 0

    # run
    try:
        with open(args.scenario) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.grid is not None:
        doc.setdefault("grid", {})["cells"] = args.grid
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        from .scenario import from_dict

        sc = from_dict(doc)
    except ScenarioError as e:
        print(f"invalid scenario: {e}", file=sys.stderr)
        return 2
    try:
        return run_scenario(sc, Path(args.out), quiet=args.quiet)
    except CFLError as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return 3
    except CausalkitError as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
