"""Figures and series dumps for eigenvalue-estimation experiment CSVs."""

from .series import (
    SCHEMA,
    ZERO_BASELINE,
    CsvFormatError,
    ResultPoint,
    Series,
    aggregate,
    load_points,
    samplers_in,
    targets_in,
)

__version__ = "0.1.0"

__all__ = [
    "SCHEMA",
    "ZERO_BASELINE",
    "CsvFormatError",
    "ResultPoint",
    "Series",
    "aggregate",
    "load_points",
    "samplers_in",
    "targets_in",
    "render",
    "__version__",
]


def __getattr__(name):
    # figure pulls in matplotlib; keep that cost out of series-only use
    if name == "render":
        from .figure import render

        return render
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
