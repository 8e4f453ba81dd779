"""Shared generators and independent oracles for the test suite."""

import numpy as np

from bimoment import closure as cl
from bimoment.states import ClosureKind, PrimState, prim_state


def random_prims(kind: ClosureKind, n: int, rng, q_floor: float = 0.0) -> PrimState:
    """Random realizable primitive states.

    ``q_floor`` bounds |q| away from zero (in units of sqrt(p^3/rho)) for
    tests sensitive to the conditioning of the near-degenerate inversion.
    """
    rho = rng.uniform(0.1, 5.0, n)
    u = rng.uniform(-3.0, 3.0, n)
    p = rng.uniform(0.05, 5.0, n)
    q_scale = np.sqrt(p**3 / rho)
    q = rng.uniform(-2.0, 2.0, n) * q_scale
    if q_floor > 0.0:
        tiny = np.abs(q) < q_floor * q_scale
        q = np.where(tiny, np.sign(q + (q == 0.0)) * q_floor * q_scale, q)
    if kind is ClosureKind.BIDELTA:
        return prim_state(rho, u, p, q)
    lo = cl.r_lower_bound(rho, p, q)
    if kind is ClosureKind.BIGAUSSIAN:
        r = lo + rng.uniform(0.0, 4.0, n) * p**2 / rho
    else:
        hi = cl.r_upper_bound_bspline(rho, p, q)
        r = lo + rng.uniform(0.02, 0.98, n) * (hi - lo)
    return prim_state(rho, u, p, q, r)


def forward_moments(params: cl.QuadParams, kind: ClosureKind, n_moments: int) -> np.ndarray:
    """Raw moments of the reconstructed ansatz, independent of the inversion.

    Uses the per-node central moments of each bump: delta (0), Gaussian
    (sigma, 3 sigma^2), triangle B-spline (sigma/24, sigma^2/240).
    """
    if kind is ClosureKind.BIDELTA:
        m2c, m4c = 0.0, 0.0
    elif kind is ClosureKind.BIGAUSSIAN:
        m2c, m4c = params.sigma, 3.0 * params.sigma**2
    else:
        m2c, m4c = params.sigma / 24.0, params.sigma**2 / 240.0
    out = []
    for mu, w in ((params.mu1, params.w1), (params.mu2, params.w2)):
        node = [w * np.ones_like(mu), w * mu, w * (mu**2 + m2c),
                w * (mu**3 + 3.0 * mu * m2c),
                w * (mu**4 + 6.0 * mu**2 * m2c + m4c)]
        out.append(np.stack(node[:n_moments], axis=-1))
    return out[0] + out[1]


def moment_scale(prim: PrimState, n_moments: int) -> np.ndarray:
    """Characteristic magnitude of each raw moment, for relative errors."""
    v = 1.0 + np.abs(prim.u) + np.sqrt(prim.p / prim.rho)
    ls = np.arange(n_moments)
    return np.asarray(prim.rho)[..., None] * v[..., None] ** ls


def bisect_root(f, lo: float, hi: float, iters: int = 200) -> float:
    """Plain bisection oracle (assumes one sign change on [lo, hi])."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm <= 0.0) == (flo <= 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gauss_panel_integral(fn, a: float, b: float, panels: int = 200, order: int = 12):
    """Composite Gauss-Legendre quadrature oracle."""
    xi, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    x = mid[:, None] + half * xi[None, :]
    return float(np.sum(fn(x) * w[None, :]) * half)
