"""Two-node quadrature moment closures for 1D plasma fluid models."""

from .states import (
    ClosureKind,
    DegenerateState,
    NonPositiveDensity,
    NonPositivePressure,
    NonRealizable,
    NonRecoverable,
    PrimState,
    StateError,
    cons_to_prim,
    prim_state,
    prim_to_cons,
)

__version__ = "0.1.0"

__all__ = [
    "ClosureKind",
    "DegenerateState",
    "NonPositiveDensity",
    "NonPositivePressure",
    "NonRealizable",
    "NonRecoverable",
    "PrimState",
    "StateError",
    "cons_to_prim",
    "prim_state",
    "prim_to_cons",
    "__version__",
]
