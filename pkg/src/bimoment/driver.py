"""Strang-split time loop, scenario construction, and diagnostics.

One step of the collisional solver executes, in order: field solve from the
current density, exact collision over dt/2 with that frozen field, one
SSP-RK3 transport step of the closed collisionless system over dt, a second
field solve, and the closing collision over dt/2.  The collisionless
sentinel epsilon = inf skips the field solves and collisions entirely.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .collision import CollisionStep, collide_exact, equilibrium_moments
from .dg import (
    DgField,
    Grid,
    SolverStats,
    basis,
    cfl_dt,
    project,
    project_values,
    quad_rule,
    semi_discrete_rhs,
    ssp_rk3_step,
)
from .field import BackgroundCharge, efield_values, solve_efield
from .states import ClosureKind, P_MIN, prim_state, prim_to_cons

SQRT2PI = np.sqrt(2.0 * np.pi)

# int_0^1 exp(cos 2 pi x) dx, the normalization of the background charge.
EXP_COS_INTEGRAL = 1.2660658777520083

_TIME_TOL = 1e-12


class ConfigError(ValueError):
    pass


class UnknownScenario(ConfigError):
    pass


@dataclass(frozen=True)
class _ScenarioDefaults:
    fixed_closure: ClosureKind | None
    default_closure: ClosureKind
    epsilon: float
    t_final: float
    collisional: bool


SCENARIOS = {
    "shocktube_fig1": _ScenarioDefaults(ClosureKind.BIGAUSSIAN, ClosureKind.BIGAUSSIAN,
                                        np.inf, 0.1, False),
    "shocktube_fig2": _ScenarioDefaults(ClosureKind.BIGAUSSIAN, ClosureKind.BIGAUSSIAN,
                                        np.inf, 0.1, False),
    "shocktube_fig3": _ScenarioDefaults(ClosureKind.BIBSPLINE, ClosureKind.BIBSPLINE,
                                        np.inf, 0.1, False),
    "ap_equilibrium": _ScenarioDefaults(None, ClosureKind.BIGAUSSIAN, 1e-3, 0.1, True),
    "ap_nonequilibrium": _ScenarioDefaults(None, ClosureKind.BIGAUSSIAN, 1e-3, 0.1, True),
    "double_riemann": _ScenarioDefaults(None, ClosureKind.BIBSPLINE, 1e-6, 0.1, True),
    "custom": _ScenarioDefaults(None, ClosureKind.BIGAUSSIAN, np.inf, 0.1, False),
}

SHOCKTUBE_STATES = {
    "shocktube_fig1": ((1.5, -0.5, 1.5, 1.0, 4.5), (1.0, -0.5, 1.0, 0.5, 3.0)),
    "shocktube_fig2": ((1.0, 1.0, 1.0 / 3.0, 0.0, 0.3), (1.0, -1.0, 1.0 / 3.0, 0.0, 0.3)),
    "shocktube_fig3": ((1.5, -0.5, 1.5, 1.0, 4.5), (1.0, -0.5, 1.0, 0.5, 3.0)),
}


@dataclass
class ScenarioConfig:
    """Everything a run needs; unset fields pick up scenario defaults."""

    scenario: str
    closure: ClosureKind | None = None
    elements: int = 64
    degree: int = 2
    cfl: float = 0.9
    epsilon: float | None = None
    t_final: float | None = None
    snapshots: tuple[float, ...] | None = None
    out_dir: str = "out"
    diag_stride: int = 1
    limiter: bool = True
    p_min: float = P_MIN
    custom_left: tuple | None = None
    custom_right: tuple | None = None
    custom_split: float = 0.5


@dataclass
class DiagnosticsRecord:
    t: float
    eq_norm: float
    mass: float
    repairs: int
    hyp_loss: int


@dataclass
class RunResult:
    config: ScenarioConfig
    grid: Grid
    snapshots: list          # (t, DgField, E coefficients or None)
    diagnostics: list[DiagnosticsRecord]
    files: list[str] = dc_field(default_factory=list)
    wall_time: float = 0.0


def normalize_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Fill scenario defaults and reject inconsistent combinations."""
    if cfg.scenario not in SCENARIOS:
        raise UnknownScenario(
            f"unknown scenario '{cfg.scenario}' (choose from {sorted(SCENARIOS)})")
    defaults = SCENARIOS[cfg.scenario]
    closure = cfg.closure
    if defaults.fixed_closure is not None:
        if closure is not None and closure is not defaults.fixed_closure:
            raise ConfigError(
                f"scenario {cfg.scenario} is fixed to closure "
                f"{defaults.fixed_closure.value}, got {closure.value}")
        closure = defaults.fixed_closure
    elif closure is None:
        closure = defaults.default_closure
    epsilon = defaults.epsilon if cfg.epsilon is None else cfg.epsilon
    if not defaults.collisional and np.isfinite(epsilon):
        raise ConfigError(
            f"scenario {cfg.scenario} has no background charge; epsilon must be inf")
    if np.isfinite(epsilon) and epsilon <= 0.0:
        raise ConfigError("epsilon must be positive")
    t_final = defaults.t_final if cfg.t_final is None else cfg.t_final
    if t_final < 0.0:
        raise ConfigError("tfinal must be nonnegative")
    snapshots = cfg.snapshots if cfg.snapshots is not None else (t_final,)
    snapshots = tuple(sorted(set(float(s) for s in snapshots)))
    for s in snapshots:
        if s < 0.0 or s > t_final + _TIME_TOL:
            raise ConfigError(f"snapshot time {s} outside [0, {t_final}]")
    if cfg.scenario == "custom" and (cfg.custom_left is None or cfg.custom_right is None):
        raise ConfigError("custom scenario needs left/right states")
    if cfg.elements < 2:
        raise ConfigError("need at least 2 elements")
    if not 0 <= cfg.degree <= 8:
        raise ConfigError("degree must be between 0 and 8")
    if cfg.diag_stride < 1:
        raise ConfigError("diag stride must be >= 1")
    return replace(cfg, closure=closure, epsilon=float(epsilon), t_final=float(t_final),
                   snapshots=snapshots)


# ---------------------------------------------------------------------------
# scenario construction


def _ap_density(x):
    return 0.5 * SQRT2PI * (2.0 + np.cos(2.0 * np.pi * x))


def _ap_background(x):
    return SQRT2PI / EXP_COS_INTEGRAL * np.exp(np.cos(2.0 * np.pi * x))


def _dr_density(x):
    mid = (x >= 0.25) & (x < 0.75)
    return np.where(mid, 0.5, 0.125)


def _dr_background(x):
    mid = (x >= 0.25) & (x < 0.75)
    return np.where(mid, 0.125, 0.5)


def _riemann_fn(left, right, split, kind):
    ml = prim_to_cons(prim_state(*left), kind)
    mr = prim_to_cons(prim_state(*right), kind)

    def fn(x):
        return np.where((x < split)[..., None], ml, mr)

    return fn


def _equilibrium_projection(rho_fn, rho0: BackgroundCharge, grid: Grid,
                            degree: int, kind: ClosureKind,
                            bimodal: bool = False) -> DgField:
    """Project moments of an isothermal (or symmetric bimodal) initial
    distribution whose field comes from the discrete Poisson solve."""
    rho_field = project(lambda x: rho_fn(x)[..., None], grid, degree)
    E = solve_efield(rho_field.coeffs[:, :, 0], rho0, grid)
    xi, w = quad_rule(degree + 4)
    x = grid.node_x(xi)
    rho = rho_fn(x)
    if bimodal:
        # even mixture of unit Gaussians at velocities -1.5 and +1.5
        zero = np.zeros_like(rho)
        mom = np.stack(
            [rho, zero, 3.25 * rho, zero, 21.5625 * rho], axis=-1)[..., :kind.n_moments]
    else:
        mom = equilibrium_moments(rho, efield_values(E, xi), n=kind.n_moments)
    return DgField(grid, project_values(mom, w, basis(degree, xi)))


def build_scenario(cfg: ScenarioConfig):
    """Initial DG field plus the background charge (None when collisionless)."""
    cfg = normalize_config(cfg)
    grid = Grid(0.0, 1.0, cfg.elements)
    kind = cfg.closure
    if cfg.scenario in SHOCKTUBE_STATES:
        left, right = SHOCKTUBE_STATES[cfg.scenario]
        return project(_riemann_fn(left, right, 0.5, kind), grid, cfg.degree), None
    if cfg.scenario == "custom":
        fn = _riemann_fn(cfg.custom_left, cfg.custom_right, cfg.custom_split, kind)
        return project(fn, grid, cfg.degree), None
    if cfg.scenario == "ap_equilibrium":
        rho0 = BackgroundCharge(fn=_ap_background)
        return _equilibrium_projection(_ap_density, rho0, grid, cfg.degree, kind), rho0
    if cfg.scenario == "ap_nonequilibrium":
        rho0 = BackgroundCharge(fn=_ap_background)
        return _equilibrium_projection(_ap_density, rho0, grid, cfg.degree, kind,
                                       bimodal=True), rho0
    if cfg.scenario == "double_riemann":
        rho0 = BackgroundCharge(fn=_dr_background)
        return _equilibrium_projection(_dr_density, rho0, grid, cfg.degree, kind), rho0
    raise UnknownScenario(cfg.scenario)


# ---------------------------------------------------------------------------
# stepping


def collide_field(field: DgField, tau: float, eps: float, E_coeffs: np.ndarray) -> DgField:
    """Pointwise exact collision at quadrature nodes, then L2 reprojection."""
    nq = field.degree + 6   # E^4-weighted moments need extra quadrature accuracy
    xi, w = quad_rule(nq)
    vals = field.eval(xi)
    out = collide_exact(vals, CollisionStep(tau, eps, efield_values(E_coeffs, xi)))
    return DgField(field.grid, project_values(out, w, basis(field.degree, xi)))


def transport_step(field: DgField, dt: float, kind: ClosureKind, limiter: bool,
                   p_min: float, stats: SolverStats | None) -> DgField:
    return ssp_rk3_step(
        field, dt, lambda f: semi_discrete_rhs(f, kind, p_min=p_min, stats=stats),
        limiter=limiter)


def strang_step(field: DgField, dt: float, eps: float, rho0: BackgroundCharge | None,
                kind: ClosureKind, limiter: bool = True, p_min: float = P_MIN,
                stats: SolverStats | None = None) -> DgField:
    """One full split step; collisionless (eps = inf) reduces to transport."""
    if not np.isfinite(eps):
        return transport_step(field, dt, kind, limiter, p_min, stats)
    if rho0 is None:
        raise ConfigError("collisional stepping requires a background charge")
    E1 = solve_efield(field.coeffs[:, :, 0], rho0, field.grid)
    field = collide_field(field, 0.5 * dt, eps, E1)
    field = transport_step(field, dt, kind, limiter, p_min, stats)
    E2 = solve_efield(field.coeffs[:, :, 0], rho0, field.grid)
    return collide_field(field, 0.5 * dt, eps, E2)


# ---------------------------------------------------------------------------
# diagnostics


def total_mass(field: DgField) -> float:
    return field.grid.dx * float(np.sum(field.coeffs[:, 0, 0]))


def equilibrium_norm(field: DgField, rho0: BackgroundCharge | None) -> float:
    """|| M1 + rho E ||_L2 with E freshly solved from the current density.

    In the zero-mean field gauge; without a background charge E = 0 and the
    norm degenerates to || M1 ||_L2.
    """
    xi, w = quad_rule(field.degree + 4)
    vals = field.eval(xi)
    if rho0 is None:
        Ev = 0.0
    else:
        E = solve_efield(field.coeffs[:, :, 0], rho0, field.grid)
        Ev = efield_values(E, xi)
    dev = vals[..., 1] + vals[..., 0] * Ev
    return float(np.sqrt(0.5 * field.grid.dx * np.sum(w[None, :] * dev**2)))


def _record(t, field, rho0, stats: SolverStats) -> DiagnosticsRecord:
    return DiagnosticsRecord(t=t, eq_norm=equilibrium_norm(field, rho0),
                             mass=total_mass(field),
                             repairs=stats.repairs, hyp_loss=stats.hyp_loss)


# ---------------------------------------------------------------------------
# the run loop


def run(cfg: ScenarioConfig, write: bool = True) -> RunResult:
    """Execute a scenario: CFL-driven loop, exact landing on snapshot times.

    With ``write`` on, snapshot/diagnostics CSV files and the manifest are
    emitted to cfg.out_dir; the result also keeps everything in memory.
    """
    from . import cli  # file formats live with the CLI

    started = time.perf_counter()
    cfg = normalize_config(cfg)
    field, rho0 = build_scenario(cfg)
    kind = cfg.closure
    result = RunResult(config=cfg, grid=field.grid, snapshots=[], diagnostics=[])
    # collisionless runs see no field: snapshots and diagnostics use E = 0
    diag_rho0 = rho0 if np.isfinite(cfg.epsilon) else None

    def efield_or_none(f):
        if diag_rho0 is None:
            return None
        return solve_efield(f.coeffs[:, :, 0], diag_rho0, f.grid)

    pending = list(cfg.snapshots)
    t = 0.0
    result.diagnostics.append(_record(t, field, diag_rho0, SolverStats()))
    while pending and abs(pending[0] - t) <= _TIME_TOL:
        result.snapshots.append((t, field.copy(), efield_or_none(field)))
        pending.pop(0)

    while t < cfg.t_final - _TIME_TOL:
        stats = SolverStats()
        dt = cfl_dt(field, kind, nu=cfg.cfl, p_min=cfg.p_min, stats=stats)
        t_event = pending[0] if pending else cfg.t_final
        clipped = t + dt >= t_event - _TIME_TOL
        if clipped:
            dt = t_event - t
        field = strang_step(field, dt, cfg.epsilon, rho0, kind,
                            limiter=cfg.limiter, p_min=cfg.p_min, stats=stats)
        t = t_event if clipped else t + dt
        result.diagnostics.append(_record(t, field, diag_rho0, stats))
        while pending and abs(pending[0] - t) <= _TIME_TOL:
            result.snapshots.append((t, field.copy(), efield_or_none(field)))
            pending.pop(0)

    if write:
        result.files = cli.write_outputs(result)
    result.wall_time = time.perf_counter() - started
    if write:
        cli.write_manifest(result)
    return result
