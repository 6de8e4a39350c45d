"""Reading and aggregating experiment result CSVs.

The input schema is the result table written by the ``eigensample run``
command; this module depends only on that column contract, not on the
library that produced the file.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

SCHEMA = (
    "experiment_id",
    "sampler",
    "n",
    "s",
    "sample_fraction",
    "trial",
    "seed",
    "target_index",
    "true_eig",
    "est_eig",
    "abs_err",
    "scaled_err",
    "zeroed_count",
    "sample_size",
    "elapsed_ms",
)

ZERO_BASELINE = "zero"


class CsvFormatError(ValueError):
    """The input file does not follow the result-table schema."""


@dataclass(frozen=True)
class ResultPoint:
    """The slice of one CSV row that plotting needs."""

    sampler: str
    target_index: int
    sample_fraction: float
    scaled_err: float
    true_eig: float


@dataclass(frozen=True)
class Series:
    """Mean scaled error per fraction for one (sampler, target) pair."""

    sampler: str
    target_index: int
    fractions: tuple[float, ...]
    means: tuple[float, ...]


def load_points(path_or_handle: str | Path | TextIO) -> list[ResultPoint]:
    """Read result rows, keeping only the columns the plots consume.

    The header must match the known schema exactly, and the file must
    contain at least one data row.
    """
    if hasattr(path_or_handle, "read"):
        return _load(path_or_handle, "<stream>")
    with open(path_or_handle, newline="") as handle:
        return _load(handle, str(path_or_handle))


def _load(handle: TextIO, label: str) -> list[ResultPoint]:
    reader = csv.DictReader(handle)
    if reader.fieldnames is None or tuple(reader.fieldnames) != SCHEMA:
        raise CsvFormatError(f"{label}: unexpected header {reader.fieldnames}")
    points = []
    for lineno, record in enumerate(reader, start=2):
        try:
            points.append(
                ResultPoint(
                    sampler=record["sampler"],
                    target_index=int(record["target_index"]),
                    sample_fraction=float(record["sample_fraction"]),
                    scaled_err=float(record["scaled_err"]),
                    true_eig=float(record["true_eig"]),
                )
            )
        except (TypeError, ValueError):
            raise CsvFormatError(f"{label}: malformed row at line {lineno}") from None
    if not points:
        raise CsvFormatError(f"{label}: no data rows")
    return points


def aggregate(points: Iterable[ResultPoint]) -> list[Series]:
    """Group by (sampler, target, fraction) and average the scaled errors.

    NaN measurements (solver failures upstream) are dropped before
    averaging; a cell that is entirely NaN contributes no point.  Series
    come back sorted by sampler name then target, fractions ascending.
    """
    cells: dict[tuple[str, int], dict[float, list[float]]] = {}
    for pt in points:
        if math.isnan(pt.scaled_err):
            continue
        cells.setdefault((pt.sampler, pt.target_index), {}).setdefault(
            pt.sample_fraction, []
        ).append(pt.scaled_err)

    series = []
    for (sampler, target), by_fraction in sorted(cells.items()):
        fractions = tuple(sorted(by_fraction))
        means = tuple(
            sum(by_fraction[f]) / len(by_fraction[f]) for f in fractions
        )
        series.append(Series(sampler, target, fractions, means))
    return series


def samplers_in(series: Iterable[Series]) -> list[str]:
    return sorted({s.sampler for s in series})


def targets_in(series: Iterable[Series]) -> list[int]:
    return sorted({s.target_index for s in series})
