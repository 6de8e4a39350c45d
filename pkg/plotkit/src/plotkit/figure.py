"""Log-log error-scaling figures, one panel per target eigenvalue."""

from __future__ import annotations

import math
import warnings
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .series import Series, ZERO_BASELINE, aggregate, load_points, samplers_in, targets_in

_MARKERS = "osd^v*"


def _select(
    series: list[Series],
    samplers: Sequence[str] | None,
    targets: Sequence[int] | None,
) -> tuple[list[Series], list[int]]:
    """Filter to the requested samplers/targets, warning on anything absent."""
    if samplers is not None:
        present = set(samplers_in(series))
        keep = []
        for name in samplers:
            if name in present:
                keep.append(name)
            else:
                warnings.warn(f"sampler {name!r} not present in the data, skipping")
        series = [s for s in series if s.sampler in set(keep) | {ZERO_BASELINE}]
    if targets is not None:
        present_targets = set(targets_in(series))
        wanted = []
        for t in targets:
            if t in present_targets:
                wanted.append(t)
            else:
                warnings.warn(f"target {t} not present in the data, skipping")
        series = [s for s in series if s.target_index in wanted]
    panel_targets = targets_in([s for s in series if s.sampler != ZERO_BASELINE])
    return series, panel_targets


def render(
    csv_path: str | Path,
    output_path: str | Path,
    samplers: Sequence[str] | None = None,
    targets: Sequence[int] | None = None,
) -> Path:
    """Plot mean scaled error against sample fraction on log-log axes.

    Each target gets its own panel.  The all-zeros baseline, whose error
    does not depend on the fraction, is drawn as a horizontal dashed
    reference; it is omitted on panels where its level is zero, which a
    log axis cannot show.  Returns the written path.
    """
    series, panel_targets = _select(aggregate(load_points(csv_path)), samplers, targets)
    if not panel_targets:
        raise ValueError("nothing to plot: no requested sampler/target has data")

    ncols = min(3, len(panel_targets))
    nrows = math.ceil(len(panel_targets) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False
    )

    for slot, target in enumerate(panel_targets):
        ax = axes[slot // ncols][slot % ncols]
        lines = 0
        for s in series:
            if s.target_index != target:
                continue
            if s.sampler == ZERO_BASELINE:
                level = s.means[0] if s.means else 0.0
                if level > 0.0:
                    ax.axhline(
                        level, color="gray", linestyle="--", linewidth=1.0,
                        label="zero baseline",
                    )
                continue
            positive = [(f, m) for f, m in zip(s.fractions, s.means) if m > 0.0]
            if not positive:
                warnings.warn(
                    f"series {s.sampler!r} target {target} is identically zero,"
                    " not drawable on log axes"
                )
                continue
            xs, ys = zip(*positive)
            ax.loglog(
                xs, ys, marker=_MARKERS[lines % len(_MARKERS)],
                markersize=4, label=s.sampler,
            )
            lines += 1
        ax.set_title(f"eigenvalue #{target}")
        ax.set_xlabel("sample fraction")
        ax.set_ylabel("mean scaled error")
        ax.grid(True, which="both", alpha=0.3)
        if lines or ax.lines:
            ax.legend(fontsize=8)

    for slot in range(len(panel_targets), nrows * ncols):
        axes[slot // ncols][slot % ncols].axis("off")

    fig.tight_layout()
    out = Path(output_path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
