"""Discontinuous Galerkin discretization on a periodic uniform grid.

Each element carries an orthonormal Legendre expansion with respect to the
inner product (1/2) int_{-1}^{1} . dxi, so the first coefficient is the cell
average.  Transport uses kinetic flux-vector splitting at the interfaces,
Gauss quadrature with degree+4 points for the interior flux integral (the
split fluxes are not polynomial), SSP-RK3 in time, and the hierarchical
moment limiter after every stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closure as cl
from .states import ClosureKind, NonRecoverable, P_MIN, cons_to_prim

# Relative change that counts as a realizability repair event.
_REPAIR_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of m elements on [a, b]."""

    a: float
    b: float
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("need at least 2 elements")
        if not self.b > self.a:
            raise ValueError("domain ends out of order")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.m

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.m) + 0.5) * self.dx

    def node_x(self, xi: np.ndarray) -> np.ndarray:
        """Physical coordinates of reference points xi in every element, (m, nq)."""
        return self.centers()[:, None] + 0.5 * self.dx * np.asarray(xi)[None, :]


_RULES: dict = {}


def quad_rule(n: int):
    """Gauss-Legendre points and weights on [-1, 1] (weights sum to 2)."""
    if n not in _RULES:
        _RULES[n] = np.polynomial.legendre.leggauss(n)
    return _RULES[n]


def basis(degree: int, xi) -> np.ndarray:
    """Orthonormal Legendre values phi_l(xi) = sqrt(2l+1) P_l(xi), (nq, degree+1)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = np.empty((degree + 1, xi.size))
    P[0] = 1.0
    if degree >= 1:
        P[1] = xi
    for l in range(1, degree):
        P[l + 1] = ((2 * l + 1) * xi * P[l] - l * P[l - 1]) / (l + 1)
    scale = np.sqrt(2.0 * np.arange(degree + 1) + 1.0)
    return (P * scale[:, None]).T


def basis_deriv(degree: int, xi) -> np.ndarray:
    """d phi_l / d xi at the reference points, (nq, degree+1)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = basis(degree, xi).T / np.sqrt(2.0 * np.arange(degree + 1) + 1.0)[:, None]
    dP = np.zeros_like(P)
    if degree >= 1:
        dP[1] = 1.0
    for l in range(1, degree):
        dP[l + 1] = (2 * l + 1) * P[l] + dP[l - 1]
    scale = np.sqrt(2.0 * np.arange(degree + 1) + 1.0)
    return (dP * scale[:, None]).T


@dataclass
class DgField:
    """Per-element Legendre coefficients, shape (elements, degree+1, components)."""

    grid: Grid
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_comp(self) -> int:
        return self.coeffs.shape[2]

    def eval(self, xi) -> np.ndarray:
        """Values at reference points xi within every element, (m, nq, C)."""
        B = basis(self.degree, xi)
        return np.einsum("mlc,ql->mqc", self.coeffs, B)

    def cell_averages(self) -> np.ndarray:
        return self.coeffs[:, 0, :]

    def copy(self) -> "DgField":
        return DgField(self.grid, self.coeffs.copy())


def project_values(vals: np.ndarray, w: np.ndarray, B: np.ndarray) -> np.ndarray:
    """L2 projection of node values (m, nq, C) onto the basis sampled in B."""
    return 0.5 * np.einsum("mqc,q,ql->mlc", vals, w, B)


def project(fn, grid: Grid, degree: int, n_quad: int | None = None) -> DgField:
    """L2 projection of ``fn`` (mapping x-arrays to (..., C) values)."""
    nq = n_quad if n_quad is not None else degree + 4
    xi, w = quad_rule(nq)
    vals = np.asarray(fn(grid.node_x(xi)), dtype=float)
    if vals.ndim == 2:
        vals = vals[..., None]
    return DgField(grid, project_values(vals, w, basis(degree, xi)))


@dataclass
class SolverStats:
    """Counters exposed in the run diagnostics."""

    repairs: int = 0
    hyp_loss: int = 0

    def merge(self, other: "SolverStats"):
        self.repairs += other.repairs
        self.hyp_loss += other.hyp_loss


_RHS_TABLES: dict = {}


def _rhs_tables(k: int, nq: int):
    """Cached quadrature nodes and basis matrices for the rhs evaluation."""
    key = (k, nq)
    if key not in _RHS_TABLES:
        xi, w = quad_rule(nq)
        _RHS_TABLES[key] = (xi, w, basis(k, xi), basis_deriv(k, xi),
                            basis(k, np.array([1.0]))[0], basis(k, np.array([-1.0]))[0])
    return _RHS_TABLES[key]


def _projected_prim(vals: np.ndarray, kind: ClosureKind, p_min: float,
                    stats: SolverStats | None, where: str):
    """Primitive recovery plus realizability repair at a batch of nodes."""
    rho = vals[..., 0]
    if np.any(rho <= 0.0):
        bad = np.argwhere(rho <= 0.0)[0]
        raise NonRecoverable(f"non-positive density at {where}, element {bad[0]}")
    prim = cons_to_prim(vals, kind, check=False)
    proj = cl.realizability_project(prim, kind, p_min=p_min)
    if stats is not None:
        changed = np.abs(proj.p - prim.p) > _REPAIR_TOL * np.abs(proj.p)
        changed |= np.abs(proj.q - prim.q) > _REPAIR_TOL * (np.abs(proj.q) + 1e-300)
        if kind.n_moments == 5:
            changed |= np.abs(proj.r - prim.r) > _REPAIR_TOL * (np.abs(proj.r) + 1e-300)
        stats.repairs += int(np.count_nonzero(changed))
    return proj


def semi_discrete_rhs(field: DgField, kind: ClosureKind,
                      p_min: float = P_MIN,
                      stats: SolverStats | None = None) -> np.ndarray:
    """Rate of change of the DG coefficients for the collisionless system.

    d/dt U^j_i = (1/dx) int F(U) phi_j,xi dxi
                 - (1/dx) [phi_j(1) Fhat_{i+1/2} - phi_j(-1) Fhat_{i-1/2}]

    with split-flux interface values Fhat = F+(left trace) + F-(right trace)
    and periodic wrap-around.  Node states are repaired into the realizable
    set before any flux evaluation; the polynomial itself is not modified.
    """
    k = field.degree
    dx = field.grid.dx
    nq = k + 4
    xi, w, B, dB, Bp, Bm = _rhs_tables(k, nq)

    vals = np.einsum("mlc,ql->mqc", field.coeffs, B)
    prim = _projected_prim(vals, kind, p_min, stats, "volume nodes")
    F = cl.flux_vector(prim, kind)
    interior = np.einsum("mqc,q,ql->mlc", F, w, dB) / dx

    uL = np.einsum("mlc,l->mc", field.coeffs, Bp)   # left trace of interface i+1/2
    uR = np.einsum("mlc,l->mc", field.coeffs, Bm)
    primL = _projected_prim(uL, kind, p_min, stats, "left traces")
    primR = _projected_prim(np.roll(uR, -1, axis=0), kind, p_min, stats, "right traces")
    fp, _ = cl.kfvs_half_moments(cl.invert(primL, kind), kind)
    _, fm = cl.kfvs_half_moments(cl.invert(primR, kind), kind)
    fhat = fp + fm                                   # (m, C), interface right of element i

    boundary = (np.einsum("mc,l->mlc", fhat, Bp)
                - np.einsum("mc,l->mlc", np.roll(fhat, 1, axis=0), Bm)) / dx
    return interior - boundary


def _minmod3(a, b, c):
    sa = np.sign(a)
    same = (sa == np.sign(b)) & (sa == np.sign(c))
    mag = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(same, sa * mag, 0.0)


def moment_limit(field: DgField) -> DgField:
    """Hierarchical moment limiter on the Legendre coefficients.

    The degree-d coefficient is limited against the forward and backward
    differences of the degree-(d-1) coefficients scaled by 1/sqrt(4 d^2 - 1),
    starting from the highest degree and moving down only while a
    coefficient was actually modified.  Cell averages are never touched.
    """
    k = field.degree
    if k == 0:
        return field
    c = field.coeffs.copy()
    active = np.ones((c.shape[0], c.shape[2]), dtype=bool)
    for d in range(k, 0, -1):
        scale = np.sqrt(4.0 * d * d - 1.0)
        lower = c[:, d - 1, :]
        fwd = (np.roll(lower, -1, axis=0) - lower) / scale
        bwd = (lower - np.roll(lower, 1, axis=0)) / scale
        limited = _minmod3(c[:, d, :], fwd, bwd)
        changed = limited != c[:, d, :]
        c[:, d, :] = np.where(active, limited, c[:, d, :])
        active &= changed
        if not active.any():
            break
    return DgField(field.grid, c)


def ssp_rk3_step(field: DgField, dt: float, rhs, limiter: bool = True) -> DgField:
    """One Shu-Osher SSP-RK3 step; the limiter runs after every stage."""

    def stage(coeffs):
        out = DgField(field.grid, coeffs)
        if limiter:
            out = moment_limit(out)
        if not np.all(np.isfinite(out.coeffs)):
            raise NonRecoverable("non-finite coefficients after stage")
        if np.any(out.coeffs[:, 0, 0] <= 0.0):
            raise NonRecoverable("non-positive cell-average density after stage")
        return out

    u0 = field.coeffs
    f1 = stage(u0 + dt * rhs(field))
    f2 = stage(0.75 * u0 + 0.25 * (f1.coeffs + dt * rhs(f1)))
    return stage(u0 / 3.0 + (2.0 / 3.0) * (f2.coeffs + dt * rhs(f2)))


def cfl_dt(field: DgField, kind: ClosureKind, nu: float = 0.9,
           p_min: float = P_MIN, stats: SolverStats | None = None) -> float:
    """CFL time step dt = nu dx / ((2k+1) s_max) from node wave speeds."""
    from . import hyperbolic as hyp

    k = field.degree
    xi, _ = quad_rule(k + 4)
    vals = field.eval(xi)
    prim = _projected_prim(vals, kind, p_min, None, "cfl nodes")
    lmin, lmax, flagged = hyp.wave_speeds_detail(prim, kind)
    if stats is not None:
        stats.hyp_loss += int(np.count_nonzero(flagged))
    s_max = float(np.max(np.maximum(np.abs(lmin), np.abs(lmax))))
    if not np.isfinite(s_max):
        raise NonRecoverable("non-finite wave speeds")
    return nu * field.grid.dx / ((2 * k + 1) * max(s_max, 1e-14))
