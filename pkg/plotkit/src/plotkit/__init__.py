"""Figure regeneration for bimoment CSV outputs."""

from .figures import (
    FigureSpec,
    SchemaError,
    plot_ap,
    plot_riemann_overlay,
    plot_shocktube,
    render,
)

__version__ = "0.1.0"

__all__ = ["FigureSpec", "SchemaError", "plot_ap", "plot_riemann_overlay",
           "plot_shocktube", "render", "__version__"]
