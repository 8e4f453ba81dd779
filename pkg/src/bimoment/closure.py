"""Moment inversion and flux evaluation for the three two-node ansaetze.

Each ansatz represents the distribution as two equal-shape bumps:

    bidelta   f(v) = w1 d(v - mu1) + w2 d(v - mu2)
    bigauss   f(v) = sum_i w_i N(v; mu_i, sigma),  sigma = (p/rho)(1 - alpha)
    bspline   f(v) = sum_i w_i B0(v - mu_i),       triangle of squared width
                                                   sigma = (24 p/rho)(1 - alpha)

Inversion recovers (mu1, mu2, w1, w2, alpha) from the tracked moments; the
shape parameter alpha solves a closure-specific cubic on a known bracket.
The closure moment (the first untracked raw moment of the ansatz) and the
half-line flux moments used by the kinetic flux-vector splitting are
evaluated from the same parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .states import (
    ClosureKind,
    NonRealizable,
    NonRecoverable,
    P_MIN,
    PrimState,
    prim_to_cons,
)

# Below this alpha the two Gaussians are treated as a single Gaussian; the
# skew correction q/alpha is no longer numerically meaningful there.
ALPHA_EPS = 1e-10

ALPHA_BSPLINE_MIN = 3.0 / 13.0

# Relative slack when validating realizability bounds, absorbs round-off from
# upstream conversions without admitting genuinely bad states.
_BOUND_SLACK = 1e-11

# Repair cap on the abscissa offset |q| / (2 p alpha), in thermal widths
# sqrt(p/rho).  Near the single-Gaussian boundary (r -> 3 p^2/rho, q -> 0)
# the exact inversion sends one node to infinity with vanishing weight;
# capping r at 3 p^2/rho + 2 * this * |q| sqrt(p/rho) keeps the node offset
# bounded and the closure moment continuous through q = 0.
_GAUSS_TAIL_WIDTHS = 5.0

# Repair cap on |q| in units of the thermal flux scale sqrt(p^3/rho).  Any
# skewness arising in these problems sits far below this, but a state whose
# pressure was floored while keeping an O(1) heat flux would otherwise feed
# q^3/p^2-type closure terms of order 1/p_min^2 into the fluxes.
_Q_MAX_NORMALIZED = 10.0


@dataclass
class QuadParams:
    """Two-node quadrature representation of the assumed distribution.

    ``w1 + w2 = rho``, ``mu1 <= mu2``; ``sigma`` is the per-node variance for
    the Gaussian ansatz, the squared support scale for the B-spline ansatz,
    and 0 for the delta ansatz.
    """

    mu1: np.ndarray
    mu2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    alpha: np.ndarray
    sigma: np.ndarray


def r_lower_bound(rho, p, q):
    """Least fourth cumulant-like moment admissible for either 5-moment ansatz."""
    return p**2 / rho + q**2 / p


def r_upper_bound_bigauss_q0(rho, p):
    """Cap on r when q = 0 in the two-Gaussian ansatz (single-Gaussian limit)."""
    return 3.0 * p**2 / rho


def r_upper_bound_bspline(rho, p, q):
    """Largest r the compactly supported B-spline pair can represent."""
    return 13.0 * q**2 / (3.0 * p) + 33.0 * p**2 / (13.0 * rho)


def _require_positive(prim: PrimState):
    if np.any(prim.rho <= 0.0):
        raise NonRealizable(f"density not positive: min rho = {np.min(prim.rho):.3e}")
    if np.any(prim.p <= 0.0):
        raise NonRealizable(f"pressure not positive: min p = {np.min(prim.p):.3e}")


def _nodes_and_weights(rho, u, p, q, alpha):
    """Abscissas and weights shared by all three ansaetze.

    Mathematically mu_{1,2} = u + s -/+ sqrt(p a/rho + s^2) with
    s = q/(2 p a), and w_{1,2} = rho/2 +/- rho^2 q / (2 sqrt(rho^2 q^2 +
    4 rho p^3 a^3)), but both the near abscissa and the small weight are
    evaluated in subtraction-free form so states with |s| >> sqrt(p a/rho)
    (one node carrying almost no mass) stay accurate to round-off.
    """
    s = q / (2.0 * p * alpha)
    var = p * alpha / rho
    rad = np.sqrt(var + s * s)
    sgn = np.where(s >= 0.0, 1.0, -1.0)
    near = -sgn * var / (np.abs(s) + rad)          # u + s -/+ rad, stable form
    far = s + sgn * rad
    mu1 = u + np.where(s >= 0.0, near, far)
    mu2 = u + np.where(s >= 0.0, far, near)

    G = np.sqrt(rho * rho * q * q + 4.0 * rho * p**3 * alpha**3)
    w_small = 2.0 * rho * rho * p**3 * alpha**3 / (G * (G + rho * np.abs(q)))
    w1 = np.where(q >= 0.0, rho - w_small, w_small)
    w2 = np.where(q >= 0.0, w_small, rho - w_small)
    return mu1, mu2, w1, w2


# ---------------------------------------------------------------------------
# cubic root finding


def _bracketed_newton(f, lo, hi, iters: int = 80):
    """Root of f on [lo, hi] with f(lo) <= 0 <= f(hi) and a single crossing.

    Newton from the bracket midpoint, falling back to bisection whenever a
    step leaves the current bracket.  Convexity of both closure cubics on
    their brackets makes the bracket reduction safe, and callers replace
    degenerate rows (where the root sits at a bracket end by construction)
    with stand-ins whose root is the start point, so Newton's quadratic
    phase is reached quickly for every entry.  Fully vectorized; ``f``
    returns (value, derivative).
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    x = 0.5 * (a + b)
    for _ in range(iters):
        v, d = f(x)
        neg = v <= 0.0
        a = np.where(neg, x, a)
        b = np.where(neg, b, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - v / d
        good = (d > 0.0) & np.isfinite(xn) & (xn >= a) & (xn <= b)
        xn = np.where(good, xn, 0.5 * (a + b))
        done = np.abs(xn - x) <= 1e-16 + 1e-15 * np.abs(x)
        x = xn
        if np.all(done):
            break
    return x


def cubic_residual_scale(rho, p, q, r):
    """Scale against which the alpha-cubic residual is judged."""
    return np.maximum(p**3, np.maximum(rho * q**2, np.abs(rho * r * p)))


# ---------------------------------------------------------------------------
# bi-delta


def invert_bidelta(prim: PrimState) -> QuadParams:
    """Two-point quadrature matching moments M0..M3.

    Abscissas are the roots of the degree-2 orthogonal polynomial of the
    moment-generating weight:

        mu_{1,2} = u + q/(2p) -/+ sqrt(p/rho + (q/(2p))^2)
        w_{1,2}  = rho/2 +/- rho^2 q / (2 sqrt(rho^2 q^2 + 4 rho p^3))
    """
    _require_positive(prim)
    rho, u, p, q = np.broadcast_arrays(prim.rho, prim.u, prim.p, prim.q)
    one = np.ones_like(np.asarray(rho, dtype=float))
    mu1, mu2, w1, w2 = _nodes_and_weights(rho, u, p, q, one)
    return QuadParams(mu1, mu2, w1, w2, one, np.zeros_like(one))


def closure_m4_bidelta(prim: PrimState) -> np.ndarray:
    """Fourth raw moment imposed by the two-delta ansatz.

    Equals w1 mu1^4 + w2 mu2^4 of the inverted quadrature; in primitive
    variables rho u^4 + 6 p u^2 + 4 u q + q^2/p + p^2/rho.
    """
    _require_positive(prim)
    rho, u, p, q = prim.rho, prim.u, prim.p, prim.q
    return rho * u**4 + 6.0 * p * u**2 + 4.0 * u * q + q**2 / p + p**2 / rho


# ---------------------------------------------------------------------------
# bi-Gaussian


def solve_alpha_bigauss(prim: PrimState) -> np.ndarray:
    """Shape parameter of the two-Gaussian ansatz.

    For q != 0, the unique root in (0, 1] of

        P(a) = 2 p^3 a^3 + (rho r - 3 p^2) p a - rho q^2.

    For q = 0 the cubic degenerates and a = sqrt((3 p^2 - rho r)/(2 p^2)),
    reaching the single-Gaussian limit a = 0 at r = 3 p^2 / rho.
    Realizability requires r >= p^2/rho + q^2/p, plus r <= 3 p^2/rho when
    q = 0.
    """
    _require_positive(prim)
    rho, p, q, r = prim.rho, prim.p, prim.q, prim.r
    if r is None:
        raise ValueError("bi-Gaussian closure requires r")
    rho, p, q, r = np.broadcast_arrays(rho, p, q, r)

    lo = r_lower_bound(rho, p, q)
    slack = _BOUND_SLACK * np.maximum(np.abs(lo), p**2 / rho)
    if np.any(r < lo - slack):
        worst = np.min(r - lo)
        raise NonRealizable(f"r below lower bound p^2/rho + q^2/p by {-worst:.3e}")

    q_zero = q == 0.0
    hi_q0 = r_upper_bound_bigauss_q0(rho, p)
    if np.any(q_zero & (r > hi_q0 + _BOUND_SLACK * hi_q0)):
        worst = np.max(np.where(q_zero, r - hi_q0, -np.inf))
        raise NonRealizable(f"q = 0 and r above 3 p^2/rho by {worst:.3e}")

    # q = 0 branch, clipped against round-off at both ends of the window.
    ratio = np.clip((3.0 * p**2 - rho * r) / (2.0 * p**2), 0.0, 1.0)
    alpha0 = np.sqrt(ratio)

    a3 = 2.0 * p**3
    a1 = (rho * r - 3.0 * p**2) * p
    # Entries served by the q = 0 branch get a stand-in cubic with the root
    # exactly at the start point, so they cannot stall the shared iteration.
    a0 = np.where(q_zero, 0.125 * a3 + 0.5 * a1, rho * q**2)

    def cubic(a):
        return a3 * a**3 + a1 * a - a0, 3.0 * a3 * a**2 + a1

    alpha_c = _bracketed_newton(cubic, np.zeros_like(p), np.ones_like(p))
    alpha = np.where(q_zero, alpha0, np.clip(alpha_c, 0.0, 1.0))
    return alpha if alpha.shape else float(alpha)


def invert_bigauss(prim: PrimState) -> QuadParams:
    """Two-Gaussian quadrature matching moments M0..M4.

    Same abscissa/weight structure as the delta case with p replaced by
    p*alpha (and the cubic-consistent weight radicand); below ALPHA_EPS the
    representation collapses to a single Gaussian at the bulk velocity with
    variance p/rho, discarding the (then untrackable) skew q.
    """
    alpha = np.asarray(solve_alpha_bigauss(prim), dtype=float)
    rho, u, p, q = np.broadcast_arrays(prim.rho, prim.u, prim.p, prim.q)
    degenerate = alpha < ALPHA_EPS

    a_safe = np.where(degenerate, 1.0, alpha)
    mu1, mu2, w1, w2 = _nodes_and_weights(rho, u, p, q, a_safe)
    mu1 = np.where(degenerate, u, mu1)
    mu2 = np.where(degenerate, u, mu2)
    w1 = np.where(degenerate, rho / 2.0, w1)
    w2 = np.where(degenerate, rho / 2.0, w2)
    alpha = np.where(degenerate, 0.0, alpha)
    sigma = np.maximum(p / rho * (1.0 - alpha), 0.0)

    if np.any(degenerate):
        q_tol = 1e-6 * np.sqrt(p**3 / rho)
        bad = int(np.count_nonzero(degenerate & (np.abs(q) > q_tol)))
        if bad:
            warnings.warn(
                f"single-Gaussian collapse dropped non-negligible heat flux at {bad} states",
                RuntimeWarning,
                stacklevel=2,
            )
    return QuadParams(mu1, mu2, w1, w2, alpha, sigma)


def closure_m5_bigauss(prim: PrimState, alpha=None) -> np.ndarray:
    """Fifth raw moment imposed by the two-Gaussian ansatz.

    M5 = rho u^5 + 10 p u^3 + 15 p^2 u / rho + alpha * M5t with

        M5t = qt^3/p^2 + 5 qt^2 u/p + 10 qt u^2 + 10 p qt/rho
              - (2 p alpha/rho)(4 qt + 5 p u),        qt = q / alpha,

    and qt = 0 in the single-Gaussian limit alpha -> 0.  Identical to
    w1 mu1^5 + w2 mu2^5 + 10 sigma M3 - 15 sigma^2 M1 of the inverted
    parameters.
    """
    if alpha is None:
        alpha = solve_alpha_bigauss(prim)
    alpha = np.asarray(alpha, dtype=float)
    rho, u, p, q = prim.rho, prim.u, prim.p, prim.q
    safe = np.where(alpha < ALPHA_EPS, 1.0, alpha)
    qt = np.where(alpha < ALPHA_EPS, 0.0, q / safe)
    m5t = (qt**3 / p**2 + 5.0 * qt**2 * u / p + 10.0 * qt * u**2 + 10.0 * p * qt / rho
           - (2.0 * p * alpha / rho) * (4.0 * qt + 5.0 * p * u))
    return rho * u**5 + 10.0 * p * u**3 + 15.0 * p**2 * u / rho + alpha * m5t


# ---------------------------------------------------------------------------
# bi-B-spline


def solve_alpha_bspline(prim: PrimState) -> np.ndarray:
    """Shape parameter of the two-B-spline ansatz.

    Unique root in [3/13, 1] of

        P(a) = 13 p^3 a^3 - 6 p^3 a^2 + a p (5 r rho - 12 p^2) - 5 rho q^2

    when r <= 13 q^2/(3p) + 33 p^2/(13 rho); for larger r (e.g. Gaussian
    moments) the compact support cannot represent the tails and alpha is
    clamped to its minimum 3/13.
    """
    _require_positive(prim)
    rho, p, q, r = prim.rho, prim.p, prim.q, prim.r
    if r is None:
        raise ValueError("bi-B-spline closure requires r")
    rho, p, q, r = np.broadcast_arrays(rho, p, q, r)

    lo = r_lower_bound(rho, p, q)
    slack = _BOUND_SLACK * np.maximum(np.abs(lo), p**2 / rho)
    if np.any(r < lo - slack):
        worst = np.min(r - lo)
        raise NonRealizable(f"r below lower bound q^2/p + p^2/rho by {-worst:.3e}")

    hi = r_upper_bound_bspline(rho, p, q)
    clamped = r > hi

    c3 = 13.0 * p**3
    c2 = -6.0 * p**3
    c1 = p * (5.0 * r * rho - 12.0 * p**2)
    mid = 0.5 * (ALPHA_BSPLINE_MIN + 1.0)
    # Clamped entries bypass the cubic; park their root at the start point.
    c0 = np.where(clamped, -(((c3 * mid + c2) * mid + c1) * mid), -5.0 * rho * q**2)

    def cubic(a):
        return ((c3 * a + c2) * a + c1) * a + c0, (3.0 * c3 * a + 2.0 * c2) * a + c1

    lo_b = np.full_like(p, ALPHA_BSPLINE_MIN)
    alpha = _bracketed_newton(cubic, lo_b, np.ones_like(p))
    alpha = np.where(clamped, ALPHA_BSPLINE_MIN, np.clip(alpha, ALPHA_BSPLINE_MIN, 1.0))
    return alpha if alpha.shape else float(alpha)


def invert_bspline(prim: PrimState) -> QuadParams:
    """Two-B-spline quadrature; abscissas/weights as in the Gaussian case."""
    alpha = np.asarray(solve_alpha_bspline(prim), dtype=float)
    rho, u, p, q = np.broadcast_arrays(prim.rho, prim.u, prim.p, prim.q)
    mu1, mu2, w1, w2 = _nodes_and_weights(rho, u, p, q, alpha)
    sigma = np.maximum(24.0 * p / rho * (1.0 - alpha), 0.0)
    return QuadParams(mu1, mu2, w1, w2, alpha, sigma)


def closure_m5_bspline(prim: PrimState, alpha) -> np.ndarray:
    """Fifth raw moment imposed by the two-B-spline ansatz.

    alpha >= 3/13 keeps the q/alpha terms regular; with a clamped alpha the
    value is the exact fifth moment of the clamped representation.
    """
    alpha = np.asarray(alpha, dtype=float)
    rho, u, p, q = prim.rho, prim.u, prim.p, prim.q
    return (rho * u**5
            + 10.0 * u**2 * (p * u + q)
            + (2.0 * p * q / rho) * (5.0 - 4.0 * alpha)
            + (p**2 * u / rho) * (12.0 + 6.0 * alpha - 13.0 * alpha**2)
            + 5.0 * q**2 * u / (p * alpha)
            + q**3 / (p**2 * alpha**2))


# ---------------------------------------------------------------------------
# dispatch helpers


def invert(prim: PrimState, kind: ClosureKind) -> QuadParams:
    if kind is ClosureKind.BIDELTA:
        return invert_bidelta(prim)
    if kind is ClosureKind.BIGAUSSIAN:
        return invert_bigauss(prim)
    return invert_bspline(prim)


def closure_moment(prim: PrimState, kind: ClosureKind) -> np.ndarray:
    """The first untracked raw moment (M4 or M5) of the ansatz."""
    if kind is ClosureKind.BIDELTA:
        return closure_m4_bidelta(prim)
    if kind is ClosureKind.BIGAUSSIAN:
        return closure_m5_bigauss(prim)
    return closure_m5_bspline(prim, solve_alpha_bspline(prim))


def flux_vector(prim: PrimState, kind: ClosureKind) -> np.ndarray:
    """Analytic flux of the closed moment system: (M1, ..., M_{N-1}, Mbar_N)."""
    m = prim_to_cons(prim, kind)
    return np.concatenate(
        [m[..., 1:], closure_moment(prim, kind)[..., np.newaxis]], axis=-1)


# ---------------------------------------------------------------------------
# kinetic flux-vector splitting


def _gauss_half_moments(mu, sigma, kmax):
    """I_k = int_0^inf v^k N(v; mu, sigma) dv for k = 0..kmax (stacked last)."""
    t = mu / np.sqrt(sigma)
    i0 = 0.5 * erfc(-t / np.sqrt(2.0))
    g0 = np.exp(-0.5 * t**2) / np.sqrt(2.0 * np.pi * sigma)  # density at v = 0
    out = [i0, mu * i0 + sigma * g0]
    for k in range(2, kmax + 1):
        out.append(mu * out[k - 1] + (k - 1) * sigma * out[k - 2])
    return np.stack(out, axis=-1)


def _power_table(x, n):
    """x^j for j = 0..n stacked on a trailing axis (cheap repeated multiply)."""
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    for j in range(1, n + 1):
        out[..., j] = out[..., j - 1] * x
    return out


def _triangle_half_moments(mu, sigma, kmax, side):
    """int v^k B0(v - mu) dv over the positive (side=+1) or negative half-line.

    B0 is the unit-mass triangle of half-width sqrt(sigma)/2 centred at mu,
    integrated exactly piece by piece after clipping to the half-line.
    """
    h = 0.5 * np.sqrt(sigma)
    slope = 4.0 / sigma
    pieces = (
        (mu - h, mu, -(mu - h) * slope, slope),   # rising edge
        (mu, mu + h, (mu + h) * slope, -slope),   # falling edge
    )
    total = 0.0
    denom = np.arange(1.0, kmax + 3.0)
    for a, b, c0, c1 in pieces:
        if side > 0:
            a_c, b_c = np.maximum(a, 0.0), np.maximum(b, 0.0)
        else:
            a_c, b_c = np.minimum(a, 0.0), np.minimum(b, 0.0)
        # ints[..., k] = int_a^b v^k dv for k = 0..kmax+1
        ints = (_power_table(b_c, kmax + 2)[..., 1:]
                - _power_table(a_c, kmax + 2)[..., 1:]) / denom
        contrib = c0[..., None] * ints[..., :kmax + 1] + c1[..., None] * ints[..., 1:]
        total = total + contrib
    return total


def kfvs_half_moments(params: QuadParams, kind: ClosureKind,
                      n_moments: int | None = None):
    """Half-line flux moments of the reconstructed distribution.

    Returns (F+, F-) with F+_l = int_0^inf v^{l+1} f dv and F-_l the
    complementary integral, for l = 0..n_moments-1.  Their sum is the
    analytic flux vector of the closure.
    """
    if n_moments is None:
        n_moments = kind.n_moments
    mu1, mu2 = np.asarray(params.mu1, float), np.asarray(params.mu2, float)
    w1, w2 = np.asarray(params.w1, float), np.asarray(params.w2, float)
    sigma = np.asarray(params.sigma, float)
    powers = np.arange(1, n_moments + 1)
    smooth = sigma > 0.0

    # Point-mass selection by sign of the abscissa; v^{l+1} kills mu = 0.
    # Abscissas of smooth states are masked out (they only feed the
    # sigma == 0 branch and may be large enough to overflow the powers).
    def delta_split(mu, w):
        mu = np.where(smooth, 0.0, mu) if kind is not ClosureKind.BIDELTA else mu
        vals = w[..., None] * mu[..., None] ** powers
        pos = (mu > 0.0)[..., None]
        return np.where(pos, vals, 0.0), np.where(pos, 0.0, vals)

    fp1_d, fm1_d = delta_split(mu1, w1)
    fp2_d, fm2_d = delta_split(mu2, w2)
    fp_delta = fp1_d + fp2_d
    fm_delta = fm1_d + fm2_d

    if kind is ClosureKind.BIDELTA:
        return fp_delta, fm_delta

    sigma_s = np.where(smooth, sigma, 1.0)
    if kind is ClosureKind.BIGAUSSIAN:
        signs = (-1.0) ** powers
        fp = (w1[..., None] * _gauss_half_moments(mu1, sigma_s, n_moments)[..., 1:]
              + w2[..., None] * _gauss_half_moments(mu2, sigma_s, n_moments)[..., 1:])
        # negative half-line by reflection symmetry of the Gaussian
        fm = signs * (w1[..., None] * _gauss_half_moments(-mu1, sigma_s, n_moments)[..., 1:]
                      + w2[..., None] * _gauss_half_moments(-mu2, sigma_s, n_moments)[..., 1:])
    else:
        fp = (w1[..., None] * _triangle_half_moments(mu1, sigma_s, n_moments, +1)[..., 1:]
              + w2[..., None] * _triangle_half_moments(mu2, sigma_s, n_moments, +1)[..., 1:])
        fm = (w1[..., None] * _triangle_half_moments(mu1, sigma_s, n_moments, -1)[..., 1:]
              + w2[..., None] * _triangle_half_moments(mu2, sigma_s, n_moments, -1)[..., 1:])

    smooth = smooth[..., None]
    return np.where(smooth, fp, fp_delta), np.where(smooth, fm, fm_delta)


# ---------------------------------------------------------------------------
# realizability repair


def realizability_project(prim: PrimState, kind: ClosureKind,
                          p_min: float = P_MIN) -> PrimState:
    """Clamp a primitive state into the realizable set of the closure.

    Pressure is floored at ``p_min`` and the heat flux is clipped to
    _Q_MAX_NORMALIZED thermal flux units sqrt(p^3/rho) (states broken by
    limiting can pair a floored pressure with an O(1) heat flux, whose
    closure fluxes scale like q^3/p^2).  For the five-moment closures r is
    then raised to its lower bound; for the Gaussian ansatz r is also
    capped at 3 p^2/rho + 2 * _GAUSS_TAIL_WIDTHS * |q| sqrt(p/rho), the
    continuous extension of the q = 0 realizability cap that keeps the
    inverted abscissas within a bounded number of thermal widths of the
    bulk velocity (the exact inversion is singular as q -> 0 at fixed
    r > 3 p^2/rho).  Idempotent.  A non-positive density cannot be repaired
    and raises NonRecoverable.
    """
    if np.any(prim.rho <= 0.0):
        raise NonRecoverable(f"min rho = {np.min(prim.rho):.3e}")
    p = np.maximum(prim.p, p_min)
    q_lim = _Q_MAX_NORMALIZED * np.sqrt(p**3 / prim.rho)
    q = np.clip(prim.q, -q_lim, q_lim)
    if kind.n_moments == 4:
        return PrimState(prim.rho, prim.u, p, q, None)
    lower = r_lower_bound(prim.rho, p, q)
    r = np.maximum(prim.r, lower)
    if kind is ClosureKind.BIGAUSSIAN:
        cap = (r_upper_bound_bigauss_q0(prim.rho, p)
               + 2.0 * _GAUSS_TAIL_WIDTHS * np.abs(q) * np.sqrt(p / prim.rho))
        r = np.where((cap > lower) & (r > cap), cap, r)
    return PrimState(prim.rho, prim.u, p, q, r)
