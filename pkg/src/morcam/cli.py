"""Scenario-driven command line front end.

A scenario is a single YAML file naming a potential pair, a grid, and a
run type; every report embeds the fully resolved scenario (defaults
expanded) so runs can be archived and replayed.

Exit codes: 0 success, 2 parse/usage error, 3 parameter error, 4 solver
error, 5 accuracy error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .admissibility import admissibility_report
from .errors import AccuracyError, ParameterError, SolverError
from .fields import BUILTIN_POTENTIALS, make_potential_pair, trapping_component
from .grids import RadialGrid, save_field
from .resolvent import DATUM_BUILTINS, ResolventProblem, make_datum, solve
from .verify import epsilon_sweep, identity_scan

RUN_TYPES = {
    "fields-check": "sample B_tau and divergence statistics of the potential",
    "admissibility": "constants C1, C2, C3 and the smallness verdict",
    "solve": "solve the resolvent problem once and snapshot the solution",
    "verify-identity": "solve, then evaluate the multiplier identity",
    "sweep": "solve across an eps ladder and report estimate ratios",
}

_DEFAULTS = {
    "lambda": 0.0,
    "eps": 1.0,
    "eps_list": [1.0, 0.1, 0.01],
    "f": {"name": "gaussian"},
    "M": None,
    "beta": 1e-3,
    "delta": None,
    "tol": 1e-10,
    "seed": 0,
    "samples": 1000,
}


class ScenarioError(Exception):
    pass


def _resolve_scenario(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a mapping")
    sc = dict(_DEFAULTS)
    sc.update(raw)
    for key in ("n", "grid", "run"):
        if key not in sc:
            raise ScenarioError(f"scenario is missing required key '{key}'")
    if sc["run"] not in RUN_TYPES:
        raise ScenarioError(
            f"unknown run type '{sc['run']}'; choose from {sorted(RUN_TYPES)}")
    pot = sc.get("potential") or {}
    sc["potential"] = {"A": pot.get("A"), "V": pot.get("V")}
    grid = sc["grid"]
    if not isinstance(grid, dict) or "L" not in grid or "h" not in grid:
        raise ScenarioError("grid must be a mapping with keys L and h")
    return sc


def _build(sc):
    pp = make_potential_pair(int(sc["n"]), sc["potential"]["A"], sc["potential"]["V"])
    grid = RadialGrid(int(sc["n"]), float(sc["grid"]["L"]), float(sc["grid"]["h"]))
    return pp, grid


def _run_fields_check(sc):
    pp, grid = _build(sc)
    rng = np.random.default_rng(int(sc["seed"]))
    n, L = grid.n, grid.L
    pts = rng.uniform(-L, L, size=(int(sc["samples"]), n))
    r = np.linalg.norm(pts, axis=1)
    pts = pts[r > 0.5]
    bt = trapping_component(pp, pts)
    btn = np.linalg.norm(bt, axis=1)
    return {
        "max_btau": float(btn.max()),
        "mean_btau": float(btn.mean()),
        "samples": int(pts.shape[0]),
    }


def _run_admissibility(sc):
    pp, _grid = _build(sc)
    return admissibility_report(pp, int(sc["n"])).to_json()


def _solve(sc):
    pp, grid = _build(sc)
    f = make_datum(grid, sc["f"])
    prob = ResolventProblem(pp=pp, lam=float(sc["lambda"]), eps=float(sc["eps"]), f=f)
    u = solve(prob, tol=float(sc["tol"]))
    return pp, grid, f, u


def _run_solve(sc, out_dir: Path):
    pp, grid, f, u = _solve(sc)
    snap = out_dir / "solution.field"
    save_field(u, snap)
    return {
        "residual": float(u.residual),
        "l2_norm": math.sqrt(u.l2_norm_sq()),
        "snapshot": str(snap),
    }


def _run_verify_identity(sc):
    pp, grid, f, u = _solve(sc)
    M = sc["M"] if sc["M"] is not None else 1.0
    rep = identity_scan(u, f, pp, float(sc["lambda"]), float(sc["eps"]),
                        M=float(M), beta=float(sc["beta"]))
    return rep.to_json()


def _run_sweep(sc, out_dir: Path):
    pp, grid = _build(sc)
    rep = epsilon_sweep(pp, float(sc["lambda"]), sc["f"],
                        [float(e) for e in sc["eps_list"]], grid,
                        M=sc["M"], delta=sc["delta"], tol=float(sc["tol"]))
    csv_path = out_dir / "sweep.csv"
    csv_path.write_text(rep.to_csv(), encoding="utf-8", newline="\n")
    out = rep.to_json()
    out["csv"] = str(csv_path)
    return out


def list_builtins(as_json: bool) -> str:
    data = {
        "potentials": BUILTIN_POTENTIALS,
        "data": DATUM_BUILTINS,
        "run_types": RUN_TYPES,
    }
    if as_json:
        return json.dumps(data, indent=2, sort_keys=True)
    lines = ["built-in potentials:"]
    for name, info in BUILTIN_POTENTIALS.items():
        lines.append(f"  {name:15s} [{info['kind']}] {info['doc']}"
                     + (f"  params: {info['params']}" if info["params"] else ""))
    lines.append("built-in data (f):")
    for name, params in DATUM_BUILTINS.items():
        lines.append(f"  {name:15s} params: {params}")
    lines.append("run types:")
    for name, doc in RUN_TYPES.items():
        lines.append(f"  {name:15s} {doc}")
    return "\n".join(lines)


def _write_report(out_dir: Path, name: str, payload: dict) -> Path:
    path = out_dir / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="morcam",
        description="Scenario-driven runs: trapping-field checks, "
                    "admissibility verdicts, resolvent solves, multiplier "
                    "identity verification, and eps sweeps.")
    parser.add_argument("scenario", nargs="?", help="scenario YAML file")
    parser.add_argument("--list-builtins", action="store_true",
                        help="print built-in potentials, data and run types")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable --list-builtins output")
    parser.add_argument("--json-only", action="store_true",
                        help="suppress the human-readable summary line")
    parser.add_argument("--out-dir", default=".", help="report directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap internal parallelism")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    if args.list_builtins:
        print(list_builtins(args.json))
        return 0
    if not args.scenario:
        parser.print_usage(sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        sc = _resolve_scenario(raw)
    except (OSError, yaml.YAMLError, ScenarioError) as exc:
        _write_report(out_dir, "error.json",
                      {"error": "parse", "detail": str(exc)})
        print(f"morcam: scenario error: {exc}", file=sys.stderr)
        return 2

    try:
        run = sc["run"]
        if run == "fields-check":
            result = _run_fields_check(sc)
        elif run == "admissibility":
            result = _run_admissibility(sc)
        elif run == "solve":
            result = _run_solve(sc, out_dir)
        elif run == "verify-identity":
            result = _run_verify_identity(sc)
        else:
            result = _run_sweep(sc, out_dir)
    except (ParameterError, ScenarioError, TypeError, ValueError) as exc:
        _write_report(out_dir, "error.json",
                      {"error": "parameter", "detail": str(exc), "scenario": sc})
        print(f"morcam: parameter error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        _write_report(out_dir, "error.json",
                      {"error": "solver", "detail": str(exc),
                       "achieved_residual": exc.achieved_residual, "scenario": sc})
        print(f"morcam: solver error: {exc}", file=sys.stderr)
        return 4
    except AccuracyError as exc:
        _write_report(out_dir, "error.json",
                      {"error": "accuracy", "detail": str(exc), "scenario": sc})
        print(f"morcam: accuracy error: {exc}", file=sys.stderr)
        return 5

    payload = {"scenario": sc, "result": result, "version": __version__}
    path = _write_report(out_dir, f"{sc['run']}.json", payload)
    if not args.json_only:
        print(f"morcam: {sc['run']} report written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
