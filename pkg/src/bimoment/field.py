"""Periodic electric-field solve E_x = rho0 - rho on DG coefficient data.

In one periodic dimension the field is the exact antiderivative of the
charge imbalance, fixed by the zero-mean gauge.  The per-element
antiderivative of a degree-k Legendre expansion is a degree-(k+1) expansion,
so E is returned with one more coefficient than the density and is exactly
continuous at the interfaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dg import Grid, basis, project


class IncompatibleCharge(ValueError):
    """Background and electron charge do not integrate to the same total."""


@dataclass
class BackgroundCharge:
    """Background ion density, analytic or already projected."""

    fn: Callable | None = None
    coeffs: np.ndarray | None = None

    def project_onto(self, grid: Grid, degree: int) -> np.ndarray:
        if self.coeffs is not None:
            if self.coeffs.shape != (grid.m, degree + 1):
                raise ValueError("background coefficients do not match the grid")
            return self.coeffs
        if self.fn is None:
            raise ValueError("background charge needs fn or coeffs")
        f = self.fn
        return project(lambda x: f(x)[..., None], grid, degree).coeffs[:, :, 0]


def _antiderivative_matrix(L: int) -> np.ndarray:
    """T with int_{-1}^{xi} phi_l = sum_m T[l, m] phi_m(xi), shape (L, L+1)."""
    T = np.zeros((L, L + 1))
    T[0, 0] = 1.0
    T[0, 1] = 1.0 / np.sqrt(3.0)
    for l in range(1, L):
        # int P_l = (P_{l+1} - P_{l-1}) / (2l+1), vanishing at xi = -1
        T[l, l + 1] = 1.0 / (np.sqrt(2.0 * l + 3.0) * np.sqrt(2.0 * l + 1.0))
        T[l, l - 1] = -1.0 / (np.sqrt(2.0 * l - 1.0) * np.sqrt(2.0 * l + 1.0))
    return T


def solve_efield(rho_coeffs: np.ndarray, rho0: BackgroundCharge, grid: Grid,
                 compat_tol: float = 1e-8) -> np.ndarray:
    """Zero-mean periodic field with E_x = rho0 - rho, coefficients (m, L+1).

    The background is projected onto the same broken space, the polynomial
    imbalance integrated exactly element by element, accumulated across the
    grid, and the mean removed.  Raises IncompatibleCharge when the total
    imbalance exceeds ``compat_tol`` relative to the total charge.
    """
    m_el, L = rho_coeffs.shape
    g = rho0.project_onto(grid, L - 1) - rho_coeffs
    total = grid.dx * float(np.sum(g[:, 0]))
    scale = max(grid.dx * float(np.sum(np.abs(rho_coeffs[:, 0]))), 1.0)
    if abs(total) > compat_tol * scale:
        raise IncompatibleCharge(
            f"net charge {total:.3e} exceeds {compat_tol:.1e} x {scale:.3e}")

    E = 0.5 * grid.dx * (g @ _antiderivative_matrix(L))
    jumps = grid.dx * g[:, 0]
    lefts = np.concatenate([[0.0], np.cumsum(jumps)[:-1]])
    E[:, 0] += lefts
    mean = grid.dx * float(np.sum(E[:, 0])) / (grid.b - grid.a)
    E[:, 0] -= mean
    return E


def efield_values(E_coeffs: np.ndarray, xi) -> np.ndarray:
    """Field values at reference points xi in every element, (m, nq)."""
    B = basis(E_coeffs.shape[1] - 1, xi)
    return np.einsum("ml,ql->mq", E_coeffs, B)
