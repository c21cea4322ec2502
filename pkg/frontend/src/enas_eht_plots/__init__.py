"""Four-panel theory-versus-experiment figure from hitting-time sweep CSVs."""

from .figure import FigureSpec, SchemaError, render_comparison_figure

__version__ = "0.1.0"

__all__ = ["FigureSpec", "SchemaError", "render_comparison_figure"]
