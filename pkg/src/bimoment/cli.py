"""Command-line front end: flag parsing, scenario dispatch, CSV output.

Snapshot files carry one row per sample point (element edges and center,
three per element) with columns

    x, rho, u, p, q, r, alpha, mu1, mu2, w1, w2, E

and diagnostics files one row per recorded step with columns

    t, eq_norm, mass, repairs, hyp_loss.

Floats are printed with 17 significant digits so parsed values round-trip
exactly; output bytes are deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from . import closure as cl
from .driver import (
    ConfigError,
    RunResult,
    ScenarioConfig,
    UnknownScenario,
    normalize_config,
    run,
)
from .field import IncompatibleCharge, efield_values
from .states import ClosureKind, StateError, cons_to_prim

SNAPSHOT_COLUMNS = ["x", "rho", "u", "p", "q", "r", "alpha",
                    "mu1", "mu2", "w1", "w2", "E"]
DIAG_COLUMNS = ["t", "eq_norm", "mass", "repairs", "hyp_loss"]


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got '{line}'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out

_FILE_KEYS = {"scenario", "closure", "elements", "degree", "cfl", "epsilon",
              "tfinal", "snapshots", "out", "diag_stride", "left", "right", "split"}


def _parse_epsilon(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return float("inf")
    return float(text)


def _parse_snapshots(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_state(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(","))


def parse_args(argv) -> ScenarioConfig:
    """Build a validated ScenarioConfig from flags and an optional config file.

    Flags override file values; defaults for anything else come from the
    scenario table.  Usage problems exit with status 2 via argparse.
    """
    parser = argparse.ArgumentParser(
        prog="bimoment",
        description="1D plasma fluid solver with two-node quadrature moment closures")
    parser.add_argument("--scenario", help="one of: " + ", ".join(
        ["shocktube_fig1", "shocktube_fig2", "shocktube_fig3", "ap_equilibrium",
         "ap_nonequilibrium", "double_riemann", "custom"]))
    parser.add_argument("--closure", choices=["bidelta", "bigauss", "bspline"])
    parser.add_argument("--elements", type=int)
    parser.add_argument("--degree", type=int)
    parser.add_argument("--cfl", type=float)
    parser.add_argument("--epsilon", type=str, help="scaled collision time, or 'inf'")
    parser.add_argument("--tfinal", type=float)
    parser.add_argument("--snapshots", type=str, help="comma-separated times")
    parser.add_argument("--out", type=str, help="output directory")
    parser.add_argument("--config", type=str, help="key=value file; flags override")
    parser.add_argument("--diag-stride", type=int)
    args = parser.parse_args(argv)

    merged: dict = {}
    try:
        if args.config:
            file_values = _read_config_file(args.config)
            unknown = set(file_values) - _FILE_KEYS
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            merged.update(file_values)
        for key in ("scenario", "closure", "elements", "degree", "cfl", "epsilon",
                    "tfinal", "snapshots", "out", "diag_stride"):
            val = getattr(args, key.replace("-", "_"))
            if val is not None:
                merged[key] = val
        if "scenario" not in merged:
            parser.error("--scenario is required (directly or via --config)")
        cfg = ScenarioConfig(
            scenario=str(merged["scenario"]),
            closure=(ClosureKind.from_name(str(merged["closure"]))
                     if "closure" in merged else None),
            elements=int(merged.get("elements", 64)),
            degree=int(merged.get("degree", 2)),
            cfl=float(merged.get("cfl", 0.9)),
            epsilon=(_parse_epsilon(str(merged["epsilon"]))
                     if "epsilon" in merged else None),
            t_final=float(merged["tfinal"]) if "tfinal" in merged else None,
            snapshots=(_parse_snapshots(str(merged["snapshots"]))
                       if "snapshots" in merged else None),
            out_dir=str(merged.get("out", "out")),
            diag_stride=int(merged.get("diag_stride", 1)),
            custom_left=_parse_state(str(merged["left"])) if "left" in merged else None,
            custom_right=_parse_state(str(merged["right"])) if "right" in merged else None,
            custom_split=float(merged.get("split", 0.5)),
        )
        return normalize_config(cfg)
    except (ConfigError, UnknownScenario, ValueError) as exc:
        parser.error(str(exc))


def write_snapshot(field, E_coeffs, t: float, path: str, kind: ClosureKind) -> None:
    """Sample the state at element edges and centers and write one CSV."""
    xi = np.array([-1.0, 0.0, 1.0])
    x = field.grid.node_x(xi)
    vals = field.eval(xi)
    prim = cl.realizability_project(
        cons_to_prim(vals, kind, check=False), kind)
    params = cl.invert(prim, kind)
    Ev = efield_values(E_coeffs, xi) if E_coeffs is not None else np.zeros_like(x)

    five = kind.n_moments == 5
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SNAPSHOT_COLUMNS) + "\n")
        for i in range(field.grid.m):
            for s in range(xi.size):
                row = [
                    _fmt(x[i, s]),
                    _fmt(prim.rho[i, s]),
                    _fmt(prim.u[i, s]),
                    _fmt(prim.p[i, s]),
                    _fmt(prim.q[i, s]),
                    _fmt(prim.r[i, s]) if five else "",
                    _fmt(np.asarray(params.alpha)[i, s]),
                    _fmt(np.asarray(params.mu1)[i, s]),
                    _fmt(np.asarray(params.mu2)[i, s]),
                    _fmt(np.asarray(params.w1)[i, s]),
                    _fmt(np.asarray(params.w2)[i, s]),
                    _fmt(Ev[i, s]),
                ]
                fh.write(",".join(row) + "\n")


def write_diagnostics(records, path: str, stride: int = 1) -> None:
    if not records:
        raise ValueError("empty diagnostics series")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(DIAG_COLUMNS) + "\n")
        for rec in records[::stride]:
            fh.write(",".join([_fmt(rec.t), _fmt(rec.eq_norm), _fmt(rec.mass),
                               str(rec.repairs), str(rec.hyp_loss)]) + "\n")


def write_outputs(result: RunResult) -> list[str]:
    """Emit snapshot and diagnostics CSVs; returns the file list."""
    os.makedirs(result.config.out_dir, exist_ok=True)
    files = []
    for index, (t, field, E) in enumerate(result.snapshots):
        path = os.path.join(result.config.out_dir, f"snap_t{index}.csv")
        write_snapshot(field, E, t, path, result.config.closure)
        files.append(path)
    diag_path = os.path.join(result.config.out_dir, "diagnostics.csv")
    write_diagnostics(result.diagnostics, diag_path, result.config.diag_stride)
    files.append(diag_path)
    return files


def write_manifest(result: RunResult) -> str:
    """Manifest with the config echo, version, wall time, and file inventory.

    Written last so its presence marks a completed run.
    """
    cfg = result.config
    payload = {
        "config": {
            "scenario": cfg.scenario,
            "closure": cfg.closure.value,
            "elements": cfg.elements,
            "degree": cfg.degree,
            "cfl": cfg.cfl,
            "epsilon": "inf" if not np.isfinite(cfg.epsilon) else cfg.epsilon,
            "tfinal": cfg.t_final,
            "snapshots": list(cfg.snapshots),
            "out": cfg.out_dir,
            "diag_stride": cfg.diag_stride,
            "limiter": cfg.limiter,
        },
        "version": __version__,
        "wall_time_s": result.wall_time,
        "files": [os.path.basename(f) for f in result.files],
    }
    path = os.path.join(cfg.out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    result.files.append(path)
    return path


def main(argv=None) -> int:
    cfg = parse_args(argv if argv is not None else sys.argv[1:])
    try:
        result = run(cfg)
    except (StateError, IncompatibleCharge, ConfigError) as exc:
        print(f"bimoment: run failed: {exc}", file=sys.stderr)
        return 1
    last = result.diagnostics[-1]
    print(f"{cfg.scenario}: t = {last.t:g}, steps = {len(result.diagnostics) - 1}, "
          f"mass = {last.mass:.12g}, eq_norm = {last.eq_norm:.6g}")
    for path in result.files:
        print(f"  wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
