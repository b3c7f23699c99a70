"""Panel charts for gmm-lab simulation tables."""
from .errors import GmmPlotsError, SchemaError
from .figures import FIGURE_LAYOUTS, PALETTES, STYLE, FigureSpec, figure_spec, render

__version__ = "0.1.0"

__all__ = [
    "FIGURE_LAYOUTS",
    "PALETTES",
    "STYLE",
    "FigureSpec",
    "GmmPlotsError",
    "SchemaError",
    "figure_spec",
    "render",
    "__version__",
]
