"""Eigenstructure of the closed flux Jacobians and wave-speed bounds.

The four-moment (two-delta) system has the closed-form eigenvalues
(mu1, mu1, mu2, mu2) with a defective eigenvector basis.  The five-moment
closures have companion-form Jacobians whose last row is the gradient of
the closure moment with respect to the conserved moments; that row is
computed by central finite differences and the spectrum by eigenvalues of
the companion matrix.  All eigenvectors are Vandermonde in the wave speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closure as cl
from .states import ClosureKind, DegenerateState, PrimState, cons_to_prim, prim_to_cons

_SQRT10 = np.sqrt(10.0)

# Wave-family constants of the near-equilibrium convexity indicator.
GNL_WAVE_CONSTANTS = (2.0 + _SQRT10, 2.0 - _SQRT10, 0.75, 2.0 - _SQRT10, 2.0 + _SQRT10)

# Roots whose imaginary part exceeds this (relative) are a hyperbolicity loss.
_IMAG_TOL = 1e-8

# Finite differencing of the closure row is trusted only while the shape
# parameter stays resolved across the stencil; beyond this ratio the row is
# dominated by the realizability boundary layer and a speed bound is used.
_ALPHA_STENCIL_RATIO = 2.0


@dataclass
class EigenDecomp:
    """Eigenvalues (ascending), Vandermonde right eigenvectors as columns,
    left eigenvectors as rows (None when the basis is incomplete)."""

    lam: np.ndarray
    R: np.ndarray
    L: np.ndarray | None
    defective: bool


def eigen_bidelta(prim: PrimState) -> EigenDecomp:
    """Spectrum (mu1, mu1, mu2, mu2) with only two independent eigenvectors."""
    qp = cl.invert_bidelta(prim)
    mu1 = float(np.asarray(qp.mu1))
    mu2 = float(np.asarray(qp.mu2))
    lam = np.array([mu1, mu1, mu2, mu2])
    R = np.vander(lam, 4, increasing=True).T  # columns [1, z, z^2, z^3]
    return EigenDecomp(lam, R, None, defective=True)


def _fd_step(m: np.ndarray) -> np.ndarray:
    return np.maximum(1e-6 * np.abs(m), 1e-8)


def jacobian_closure_row(prim: PrimState, kind: ClosureKind) -> np.ndarray:
    """Gradient of the closure moment w.r.t. the conserved moments.

    Central differences with relative step max(1e-6 |M_j|, 1e-8).  Raises
    DegenerateState when the base state sits in the single-Gaussian collapse
    (alpha < ALPHA_EPS), where the closure is not differentiable in a usable
    sense; raises NonRealizable if a perturbed state leaves the realizable
    set.
    """
    if kind is ClosureKind.BIDELTA:
        raise ValueError("closure row is defined for the five-moment closures")
    if kind is ClosureKind.BIGAUSSIAN:
        alpha = np.asarray(cl.solve_alpha_bigauss(prim))
        if np.any(alpha < cl.ALPHA_EPS):
            raise DegenerateState("alpha below ALPHA_EPS: closure row undefined")
    m = prim_to_cons(prim, kind)
    h = _fd_step(m)
    row = np.empty_like(m)
    for j in range(5):
        mp = m.copy()
        mm = m.copy()
        mp[..., j] += h[..., j]
        mm[..., j] -= h[..., j]
        fp = cl.closure_moment(cons_to_prim(mp, kind, check=False), kind)
        fm = cl.closure_moment(cons_to_prim(mm, kind, check=False), kind)
        row[..., j] = (fp - fm) / (2.0 * h[..., j])
    return row


# ---------------------------------------------------------------------------
# non-raising helpers for the vectorized wave-speed path


def _alpha_and_valid(rho, p, q, r, kind: ClosureKind):
    """Shape parameter plus a mask of states where it is trustworthy."""
    valid = (rho > 0.0) & (p > 0.0)
    p_s = np.where(valid, p, 1.0)
    rho_s = np.where(valid, rho, 1.0)
    lo = cl.r_lower_bound(rho_s, p_s, q)
    valid &= r >= lo - 1e-11 * np.maximum(np.abs(lo), p_s**2 / rho_s)
    r_s = np.maximum(r, lo)
    pr = PrimState(rho_s, np.zeros_like(rho_s), p_s, q, r_s)
    if kind is ClosureKind.BIGAUSSIAN:
        cap = cl.r_upper_bound_bigauss_q0(rho_s, p_s)
        valid &= ~((q == 0.0) & (r > cap * (1.0 + 1e-11)))
        pr.r = np.where((q == 0.0), np.minimum(r_s, cap), r_s)
        alpha = np.asarray(cl.solve_alpha_bigauss(pr))
        valid &= alpha >= cl.ALPHA_EPS
    else:
        alpha = np.asarray(cl.solve_alpha_bspline(pr))
    return alpha, valid


def _closure_rows_guarded(prim: PrimState, kind: ClosureKind):
    """(closure row, ok mask); never raises.

    Besides realizability of every stencil point, the two-Gaussian rows are
    rejected when alpha varies by more than _ALPHA_STENCIL_RATIO across the
    stencil: there the finite difference straddles the boundary layer near
    alpha -> 0 and produces meaningless derivatives.  The ten perturbed
    states are evaluated as one stacked batch.
    """
    m = prim_to_cons(prim, kind)
    h = _fd_step(m)
    stack = np.repeat(m[None], 10, axis=0)
    for j in range(5):
        stack[2 * j, ..., j] += h[..., j]
        stack[2 * j + 1, ..., j] -= h[..., j]

    pr = cons_to_prim(stack, kind, check=False)
    alpha, valid = _alpha_and_valid(pr.rho, pr.p, pr.q, pr.r, kind)
    # guarded closure value: clip into the realizable set before evaluating
    # (entries needing the clip are marked invalid and feed the fallback)
    p_s = np.maximum(pr.p, 1e-12)
    rho_s = np.maximum(pr.rho, 1e-12)
    pr_s = PrimState(rho_s, pr.u, p_s, pr.q,
                     np.maximum(pr.r, cl.r_lower_bound(rho_s, p_s, pr.q)))
    if kind is ClosureKind.BIGAUSSIAN:
        vals = cl.closure_m5_bigauss(pr_s, alpha)
    else:
        vals = cl.closure_m5_bspline(pr_s, alpha)

    rows = np.stack([(vals[2 * j] - vals[2 * j + 1]) / (2.0 * h[..., j])
                     for j in range(5)], axis=-1)
    alpha0, ok = _alpha_and_valid(prim.rho, prim.p, prim.q, prim.r, kind)
    ok &= np.all(valid, axis=0)
    if kind is ClosureKind.BIGAUSSIAN:
        a_min = np.minimum(alpha.min(axis=0), alpha0)
        a_max = np.maximum(alpha.max(axis=0), alpha0)
        ok &= a_max <= _ALPHA_STENCIL_RATIO * np.maximum(a_min, cl.ALPHA_EPS)
    ok &= np.all(np.isfinite(rows), axis=-1)
    return rows, ok


def companion_matrix(rows: np.ndarray) -> np.ndarray:
    """Flux Jacobian in companion form; last row is the closure gradient."""
    shape = rows.shape[:-1]
    C = np.zeros(shape + (5, 5))
    for i in range(4):
        C[..., i, i + 1] = 1.0
    C[..., 4, :] = rows
    return C


def speed_bound(prim: PrimState, kind: ClosureKind) -> np.ndarray:
    """Guaranteed bound on |wave speed|: max |mu_i| + 5 sqrt(p/rho)."""
    qp = cl.invert(prim, kind)
    return np.maximum(np.abs(qp.mu1), np.abs(qp.mu2)) + 5.0 * np.sqrt(prim.p / prim.rho)


def wave_speeds_detail(prim: PrimState, kind: ClosureKind):
    """(lambda_min, lambda_max, fallback mask), vectorized, never raises.

    Five-moment speeds are the extreme real roots of the companion quintic;
    whenever the closure row is untrustworthy or the quintic has complex
    roots (hyperbolicity loss) the guaranteed bound +-speed_bound is used
    and the state is flagged.
    """
    if kind is ClosureKind.BIDELTA:
        qp = cl.invert_bidelta(prim)
        mu1 = np.asarray(qp.mu1, dtype=float)
        return mu1, np.asarray(qp.mu2, dtype=float), np.zeros(mu1.shape, dtype=bool)

    bound = np.asarray(speed_bound(prim, kind), dtype=float)
    rows, ok = _closure_rows_guarded(prim, kind)
    scalar = bound.ndim == 0
    bound = np.atleast_1d(bound)
    rows = rows.reshape(-1, 5)
    ok = np.atleast_1d(ok).ravel().copy()

    lmin = -bound.ravel().copy()
    lmax = bound.ravel().copy()
    idx = np.flatnonzero(ok)
    if idx.size:
        roots = np.linalg.eigvals(companion_matrix(rows[idx]))
        real = np.all(np.abs(roots.imag) <= _IMAG_TOL * (1.0 + np.abs(roots)), axis=-1)
        re = roots.real
        lmin_ok = np.clip(re.min(axis=-1), -bound.ravel()[idx], bound.ravel()[idx])
        lmax_ok = np.clip(re.max(axis=-1), -bound.ravel()[idx], bound.ravel()[idx])
        lmin[idx[real]] = lmin_ok[real]
        lmax[idx[real]] = lmax_ok[real]
        ok[idx[~real]] = False

    flagged = ~ok
    if scalar:
        return float(lmin[0]), float(lmax[0]), bool(flagged[0])
    shape = np.broadcast(prim.rho, prim.p).shape
    return lmin.reshape(shape), lmax.reshape(shape), flagged.reshape(shape)


def wave_speeds(prim: PrimState, kind: ClosureKind):
    """(lambda_min, lambda_max); always returns a bound."""
    lmin, lmax, _ = wave_speeds_detail(prim, kind)
    return lmin, lmax


def near_equilibrium_speeds(prim: PrimState) -> np.ndarray:
    """Asymptotic two-Gaussian wave speeds for mu1 ~ mu2.

    z_{1,2} = c - sqrt((5 +/- sqrt(10)) p (1-alpha)/rho), z_3 = c,
    z_{4,5} = c + sqrt((5 -/+ sqrt(10)) p (1-alpha)/rho), with
    c = u + 2 qt / (5 p).
    """
    alpha = np.asarray(cl.solve_alpha_bigauss(prim), dtype=float)
    rho, u, p, q = prim.rho, prim.u, prim.p, prim.q
    qt = np.where(alpha < cl.ALPHA_EPS, 0.0, q / np.where(alpha < cl.ALPHA_EPS, 1.0, alpha))
    c = u + 2.0 * qt / (5.0 * p)
    wide = np.sqrt((5.0 + _SQRT10) * p * (1.0 - alpha) / rho)
    narrow = np.sqrt((5.0 - _SQRT10) * p * (1.0 - alpha) / rho)
    return np.stack(np.broadcast_arrays(c - wide, c - narrow, c, c + narrow, c + wide),
                    axis=-1)


def _quintic_roots_sorted(rows: np.ndarray) -> np.ndarray:
    roots = np.linalg.eigvals(companion_matrix(rows))
    if np.any(np.abs(roots.imag) > _IMAG_TOL * (1.0 + np.abs(roots))):
        raise DegenerateState("complex characteristic speeds (hyperbolicity loss)")
    return np.sort(roots.real, axis=-1)


def eigen_five_moment(prim: PrimState, kind: ClosureKind) -> EigenDecomp:
    """Full eigendecomposition of a five-moment flux Jacobian (scalar state)."""
    rows = jacobian_closure_row(prim, kind)
    z = _quintic_roots_sorted(rows)
    R = np.vander(z, 5, increasing=True).T
    span = max(z[-1] - z[0], 1e-300)
    distinct = np.min(np.diff(z)) > 1e-6 * span
    L = None
    if distinct:
        L = np.empty((5, 5))
        for k in range(5):
            others = np.delete(z, k)
            # coefficients of prod_{j != k} (x - z_j), constant term first
            L[k] = np.poly(others)[::-1] / np.prod(z[k] - others)
    return EigenDecomp(z, R, L, defective=not distinct)


def gnl_indicator(prim: PrimState, kind: ClosureKind, k: int) -> float:
    """Directional derivative of the k-th wave speed along its eigenvector.

    Zero fields are linearly degenerate; the two-delta system is linearly
    degenerate in every family, so it returns 0 exactly.
    """
    if kind is ClosureKind.BIDELTA:
        return 0.0
    eig = eigen_five_moment(prim, kind)
    z = eig.lam
    span = max(z[-1] - z[0], 1e-300)
    if np.min(np.diff(z)) <= 1e-6 * span:
        raise DegenerateState("eigenvalue collision: wave family not isolated")
    r_k = eig.R[:, k]
    m = prim_to_cons(prim, kind)
    h = 1e-6 * (1.0 + np.max(np.abs(m)))
    zp = _quintic_roots_sorted(
        jacobian_closure_row(cons_to_prim(m + h * r_k, kind, check=False), kind))
    zm = _quintic_roots_sorted(
        jacobian_closure_row(cons_to_prim(m - h * r_k, kind, check=False), kind))
    return float((zp[k] - zm[k]) / (2.0 * h))
