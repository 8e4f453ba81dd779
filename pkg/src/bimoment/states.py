"""Moment vectors, primitive variables, and the conversions between them.

The solver tracks the first N raw velocity moments M_0..M_{N-1} of a 1D
distribution function, N = 4 for the two-delta ansatz and N = 5 for the
two-Gaussian and two-B-spline ansaetze.  Primitive variables are

    rho = M0
    u   = M1 / rho
    p   = M2 - rho u^2
    q   = M3 - rho u^3 - 3 p u
    r   = M4 - rho u^4 - 6 p u^2 - 4 q u        (five-moment systems only)

All functions are vectorized: fields may be scalars or numpy arrays of any
common broadcastable shape, and moment vectors carry the component on the
last axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Pressure floor: below this a recovered pressure counts as a positivity loss.
P_MIN = 1e-12


class StateError(ValueError):
    """Base class for invalid or non-realizable fluid states."""


class NonPositiveDensity(StateError):
    pass


class NonPositivePressure(StateError):
    pass


class NonRealizable(StateError):
    """Moments do not correspond to any nonnegative distribution of the ansatz."""


class NonRecoverable(StateError):
    """State is broken beyond repair (rho <= 0); the run must abort."""


class DegenerateState(StateError):
    """Eigenstructure request in a regime where it is not defined."""


class ClosureKind(enum.Enum):
    """Which two-node ansatz closes the moment hierarchy."""

    BIDELTA = "bidelta"
    BIGAUSSIAN = "bigauss"
    BIBSPLINE = "bspline"

    @property
    def n_moments(self) -> int:
        return 4 if self is ClosureKind.BIDELTA else 5

    @classmethod
    def from_name(cls, name: str) -> "ClosureKind":
        key = name.strip().lower()
        aliases = {
            "bidelta": cls.BIDELTA,
            "delta": cls.BIDELTA,
            "bigauss": cls.BIGAUSSIAN,
            "bigaussian": cls.BIGAUSSIAN,
            "gauss": cls.BIGAUSSIAN,
            "bspline": cls.BIBSPLINE,
            "bibspline": cls.BIBSPLINE,
        }
        if key not in aliases:
            raise ValueError(f"unknown closure '{name}' (expected bidelta|bigauss|bspline)")
        return aliases[key]


@dataclass
class PrimState:
    """Primitive variables; ``r`` is None for the four-moment system."""

    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray | None = None

    def __iter__(self):
        yield from (self.rho, self.u, self.p, self.q) + (() if self.r is None else (self.r,))


def prim_state(rho, u, p, q, r=None) -> PrimState:
    """Build a PrimState with float array fields."""
    arr = lambda v: np.asarray(v, dtype=float)
    return PrimState(arr(rho), arr(u), arr(p), arr(q), None if r is None else arr(r))


def prim_to_cons(prim: PrimState, kind: ClosureKind) -> np.ndarray:
    """Raw moments of a primitive state, component on the last axis."""
    rho, u, p, q = prim.rho, prim.u, prim.p, prim.q
    m0 = rho
    m1 = rho * u
    m2 = rho * u**2 + p
    m3 = rho * u**3 + 3.0 * p * u + q
    if kind.n_moments == 4:
        return np.stack(np.broadcast_arrays(m0, m1, m2, m3), axis=-1).astype(float)
    if prim.r is None:
        raise ValueError("five-moment closure requires r")
    m4 = rho * u**4 + 6.0 * p * u**2 + 4.0 * q * u + prim.r
    return np.stack(np.broadcast_arrays(m0, m1, m2, m3, m4), axis=-1).astype(float)


def cons_to_prim(m: np.ndarray, kind: ClosureKind, check: bool = True,
                 p_min: float = P_MIN) -> PrimState:
    """Invert prim_to_cons.

    With ``check`` on, raises NonPositiveDensity for M0 <= 0 and
    NonPositivePressure when the recovered pressure falls below ``p_min``
    (a realizability loss upstream).  With ``check`` off the raw algebra is
    returned untouched, for callers that repair the state themselves.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-1] != kind.n_moments:
        raise ValueError(f"expected {kind.n_moments} moments, got {m.shape[-1]}")
    rho = m[..., 0]
    if check and np.any(rho <= 0.0):
        raise NonPositiveDensity(f"min M0 = {np.min(rho):.3e}")
    u = m[..., 1] / rho
    p = m[..., 2] - rho * u**2
    q = m[..., 3] - rho * u**3 - 3.0 * p * u
    if check and np.any(p <= p_min):
        raise NonPositivePressure(f"min p = {np.min(p):.3e}")
    r = None
    if kind.n_moments == 5:
        r = m[..., 4] - rho * u**4 - 6.0 * p * u**2 - 4.0 * q * u
    return PrimState(rho, u, p, q, r)
