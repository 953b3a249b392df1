"""Batch figure renderer for benchmark summary CSVs."""

from ._version import __version__
from .figures import FigureSpec, RenderReport, render, render_all
from .summary import METRICS, REQUIRED_COLUMNS, SchemaError, list_series, load_summary, series_label

__all__ = [
    "__version__",
    "FigureSpec",
    "RenderReport",
    "render",
    "render_all",
    "METRICS",
    "REQUIRED_COLUMNS",
    "SchemaError",
    "list_series",
    "load_summary",
    "series_label",
]
