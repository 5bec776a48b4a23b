"""Figure rendering over the simulator's CSV artifacts.

This package is a pure view layer: it parses CSV files produced by the
auctionsim command line tools and draws them with matplotlib. It never
recomputes any simulation quantity, so the simulator suite runs without
it and it runs against any CSV matching the documented schemas.
"""

from .figures import (
    COMPARISON_COLUMNS,
    CDF_COLUMNS,
    TRACE_COLUMNS,
    FigureSpec,
    plot_cdf,
    plot_comparison,
    plot_trace,
    render,
)

__all__ = [
    "COMPARISON_COLUMNS",
    "CDF_COLUMNS",
    "TRACE_COLUMNS",
    "FigureSpec",
    "plot_cdf",
    "plot_comparison",
    "plot_trace",
    "render",
]
