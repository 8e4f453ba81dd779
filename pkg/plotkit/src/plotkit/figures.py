"""Rebuild the standard figures from solver CSV output.

Pure read-only consumers of the snapshot and diagnostics schemas:

    snap_t<i>.csv    x, rho, u, p, q, r, alpha, mu1, mu2, w1, w2, E
    diagnostics.csv  t, eq_norm, mass, repairs, hyp_loss

No numerical post-processing happens here beyond plotting transforms.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SNAPSHOT_COLUMNS = ["x", "rho", "u", "p", "q", "r", "alpha",
                    "mu1", "mu2", "w1", "w2", "E"]
DIAG_COLUMNS = ["t", "eq_norm", "mass", "repairs", "hyp_loss"]

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5")


class SchemaError(ValueError):
    """CSV does not conform to the solver output contract."""


@dataclass
class FigureSpec:
    """One figure to regenerate: which style, from which CSVs, to where."""

    figure_id: str
    inputs: tuple
    output: str

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id '{self.figure_id}'")
        for path in self.inputs:
            if not os.path.exists(path):
                raise FileNotFoundError(path)


def read_table(path: str, columns) -> dict:
    """CSV as a dict of float arrays; empty cells become nan."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in columns:
            if name not in header:
                raise SchemaError(f"{path}: missing column '{name}'")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {}
    for name in columns:
        out[name] = np.array([float(r[name]) if r[name] != "" else np.nan
                              for r in rows])
    return out


def _manifest_for(csv_path: str) -> dict | None:
    path = os.path.join(os.path.dirname(os.path.abspath(csv_path)), "manifest.json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        return json.load(fh)


def snapshot_time(csv_path: str) -> float | None:
    """Snapshot time from the sibling manifest, None when unavailable."""
    manifest = _manifest_for(csv_path)
    if manifest is None:
        return None
    name = os.path.basename(csv_path)
    try:
        index = int(name.removeprefix("snap_t").removesuffix(".csv"))
        return float(manifest["config"]["snapshots"][index])
    except (ValueError, KeyError, IndexError):
        return None


def _epsilon_label(csv_path: str) -> str:
    manifest = _manifest_for(csv_path)
    if manifest is not None:
        eps = manifest.get("config", {}).get("epsilon")
        if eps is not None:
            return f"eps = {eps}"
    return os.path.basename(os.path.dirname(os.path.abspath(csv_path))) or csv_path


def plot_shocktube(snapshot_csv: str, output: str | None = None):
    """Six panels: rho, p, q, alpha, abscissa pair, weight pair."""
    data = read_table(snapshot_csv, SNAPSHOT_COLUMNS)
    x = data["x"]
    fig, axes = plt.subplots(3, 2, figsize=(9, 9), sharex=True)
    panels = [
        ("rho", [("rho", None)]),
        ("p", [("p", None)]),
        ("q", [("q", None)]),
        ("alpha", [("alpha", None)]),
        ("abscissas", [("mu1", "mu1"), ("mu2", "mu2")]),
        ("weights", [("w1", "w1"), ("w2", "w2")]),
    ]
    for ax, (title, series) in zip(axes.ravel(), panels):
        for column, label in series:
            ax.plot(x, data[column], lw=1.0, label=label)
        ax.set_title(title)
        if len(series) > 1:
            ax.legend(loc="best", fontsize=8)
    for ax in axes[-1]:
        ax.set_xlabel("x")
    fig.tight_layout()
    if output:
        fig.savefig(output, dpi=150)
    return fig


def plot_ap(diagnostics_csvs, output: str | None = None):
    """Equilibrium-norm decay, one log-scale curve per collision time."""
    if not diagnostics_csvs:
        raise ValueError("need at least one diagnostics file")
    fig, ax = plt.subplots(figsize=(7, 5))
    for path in diagnostics_csvs:
        data = read_table(path, DIAG_COLUMNS)
        ax.semilogy(data["t"], np.maximum(data["eq_norm"], 1e-300), ".-",
                    ms=3, lw=0.8, label=_epsilon_label(path))
    ax.set_xlabel("t")
    ax.set_ylabel("|| M1 + rho E ||")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    if output:
        fig.savefig(output, dpi=150)
    return fig


def plot_riemann_overlay(coarse_csv: str, fine_csv: str, output: str | None = None):
    """Coarse run as markers over the fine run as a line; rho and E panels."""
    t_c = snapshot_time(coarse_csv)
    t_f = snapshot_time(fine_csv)
    if t_c is not None and t_f is not None and abs(t_c - t_f) > 1e-12:
        raise ValueError(f"snapshot times differ: {t_c} vs {t_f}")
    coarse = read_table(coarse_csv, SNAPSHOT_COLUMNS)
    fine = read_table(fine_csv, SNAPSHOT_COLUMNS)
    fig, axes = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for ax, column in zip(axes, ("rho", "E")):
        ax.plot(fine["x"], fine[column], "-", color="tab:red", lw=1.0, label="fine")
        ax.plot(coarse["x"], coarse[column], "o", color="tab:blue", ms=2.5,
                mfc="none", label="coarse")
        ax.set_ylabel(column)
        ax.legend(loc="best", fontsize=8)
    axes[-1].set_xlabel("x")
    fig.tight_layout()
    if output:
        fig.savefig(output, dpi=150)
    return fig


def render(spec: FigureSpec):
    """Dispatch a FigureSpec to the matching plot routine."""
    if spec.figure_id in ("fig1", "fig2", "fig3"):
        (snapshot,) = spec.inputs
        return plot_shocktube(snapshot, spec.output)
    if spec.figure_id in ("fig4a", "fig4b"):
        return plot_ap(list(spec.inputs), spec.output)
    coarse, fine = spec.inputs
    return plot_riemann_overlay(coarse, fine, spec.output)
