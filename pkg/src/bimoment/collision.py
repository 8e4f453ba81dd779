"""Exact solution of the frozen-field drift-diffusion moment system.

With the electric field frozen over a substep the collision operator turns
into a linear constant-coefficient ODE system for the raw moments,

    dM_l/dt = (1/eps) [ l (l-1) M_{l-2} - l E M_{l-1} - l M_l ],

whose exact solution over a substep of length tau is polynomial in
Z = exp(-tau/eps).  The fixed point is the isothermal Gaussian with bulk
velocity -E and unit temperature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CollisionStep:
    """Substep description: length tau, scaled collision time eps, frozen E."""

    tau: float
    eps: float
    E: np.ndarray | float
    Z: float = field(init=False)

    def __post_init__(self):
        if self.tau < 0.0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        # Explicit projection to equilibrium once exp() would underflow anyway.
        if self.eps < 1e-14 * self.tau:
            self.Z = 0.0
        else:
            self.Z = float(np.exp(-self.tau / self.eps))


def equilibrium_moments(rho, E, n: int = 5) -> np.ndarray:
    """First n raw moments of rho * N(-E, 1), component on the last axis."""
    rho = np.asarray(rho, dtype=float)
    E = np.asarray(E, dtype=float)
    mom = [
        rho,
        -rho * E,
        rho * (1.0 + E**2),
        -rho * E * (E**2 + 3.0),
        rho * (E**4 + 6.0 * E**2 + 3.0),
    ]
    return np.stack(np.broadcast_arrays(*mom[:n]), axis=-1)


def collide_exact(m: np.ndarray, step: CollisionStep) -> np.ndarray:
    """Exact collision update of the moment vector over one substep.

    Works for four- or five-moment vectors (component on the last axis);
    mass M0 is conserved exactly and M1 relaxes as
    (M1 + E M0) -> Z (M1 + E M0).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    E = np.asarray(step.E, dtype=float)
    Z = step.Z
    m0, m1, m2, m3 = m[..., 0], m[..., 1], m[..., 2], m[..., 3]

    a1 = E * m0 + m1
    a2 = (E**2 - 1.0) * m0 + 2.0 * E * m1 + m2
    a3 = E * (E**2 - 3.0) * m0 + 3.0 * (E**2 - 1.0) * m1 + 3.0 * E * m2 + m3

    out = np.empty(np.broadcast(m[..., 0], E).shape + (n,), dtype=float)
    out[..., 0] = m0
    out[..., 1] = Z * a1 - E * m0
    out[..., 2] = Z**2 * a2 - 2.0 * E * Z * a1 + (1.0 + E**2) * m0
    out[..., 3] = (Z**3 * a3 - 3.0 * E * Z**2 * a2 + 3.0 * (E**2 + 1.0) * Z * a1
                   - E * (E**2 + 3.0) * m0)
    if n == 5:
        m4 = m[..., 4]
        a4 = ((E**4 - 6.0 * E**2 + 3.0) * m0 + 4.0 * E * (E**2 - 3.0) * m1
              + 6.0 * (E**2 - 1.0) * m2 + 4.0 * E * m3 + m4)
        out[..., 4] = (Z**4 * a4 - 4.0 * E * Z**3 * a3
                       + 6.0 * (E**2 + 1.0) * Z**2 * a2
                       - 4.0 * E * (E**2 + 3.0) * Z * a1
                       + (E**4 + 6.0 * E**2 + 3.0) * m0)
    return out
