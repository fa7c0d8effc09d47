"""Figure generation for holobeam sweep results."""

__version__ = "0.1.0"

from .data import aggregate_records, load_results, read_records, read_summary
from .figures import FIGURES, FigureSpec, extract_series, render, render_families

__all__ = [
    "aggregate_records",
    "load_results",
    "read_records",
    "read_summary",
    "FIGURES",
    "FigureSpec",
    "extract_series",
    "render",
    "render_families",
    "__version__",
]
