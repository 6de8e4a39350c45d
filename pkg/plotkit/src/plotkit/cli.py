"""Command line entry: figures or raw aggregated series from a result CSV."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .series import CsvFormatError, aggregate, load_points


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render log-log error-scaling figures from experiment CSVs.",
    )
    parser.add_argument("csv", help="result table produced by the experiment runner")
    parser.add_argument(
        "--output", help="figure path (default: <csv name>.png)", default=None
    )
    parser.add_argument(
        "--samplers", help="comma-separated samplers to include", default=None
    )
    parser.add_argument(
        "--targets", help="comma-separated target indices to include", default=None
    )
    parser.add_argument(
        "--dump",
        action="store_true",
        help="print the aggregated series instead of rendering",
    )
    return parser


def _dump(csv_path: str) -> None:
    print("sampler target fraction mean_scaled_err")
    for s in aggregate(load_points(csv_path)):
        for fraction, mean in zip(s.fractions, s.means):
            print(
                f"{s.sampler} {s.target_index}"
                f" {format(fraction, '.17g')} {format(mean, '.17g')}"
            )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    samplers = None
    if args.samplers is not None:
        samplers = [part.strip() for part in args.samplers.split(",") if part.strip()]
    targets = None
    if args.targets is not None:
        try:
            targets = [int(part) for part in args.targets.split(",") if part.strip()]
        except ValueError:
            print(f"error: --targets must be integers, got {args.targets!r}", file=sys.stderr)
            return 1

    try:
        if args.dump:
            _dump(args.csv)
        else:
            output = args.output or str(Path(args.csv).with_suffix(".png"))
            # local import so --dump works without a display stack
            from .figure import render

            written = render(args.csv, output, samplers=samplers, targets=targets)
            print(f"wrote {written}")
    except (OSError, CsvFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    raise SystemExit(main())
