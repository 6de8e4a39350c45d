"""Command line front end: run experiments, fit slopes, print spectra, bench."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

import numpy as np

from .core import SolverFailureError, sym_eigvals
from .harness import (
    ConfigError,
    ExperimentConfig,
    FitError,
    SAMPLER_NAMES,
    _run_one,
    build_matrix,
    derive_seed,
    load_config,
    read_csv,
    run_experiment,
    slope_fit,
    write_csv,
)
from .matrices import EdgeListParseError, MatrixMarketFormatError
from .store import StoreConstructionError

_FLAG_KEYS = (
    ("--matrix-spec", "matrix_spec", str),
    ("--samplers", "samplers", "str_list"),
    ("--sample-fractions", "sample_fractions", "float_list"),
    ("--trials", "trials", int),
    ("--target-indices", "target_indices", "int_list"),
    ("--seed", "seed", int),
    ("--c2", "c2", float),
    ("--eps", "eps", float),
    ("--entrywise-p", "entrywise_p", float),
    ("--output", "output_path", str),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    for flag, dest, kind in _FLAG_KEYS:
        if kind == "str_list":
            parser.add_argument(flag, dest=dest, type=lambda raw: [p for p in raw.split(",") if p])
        elif kind == "float_list":
            parser.add_argument(flag, dest=dest, type=lambda raw: [float(p) for p in raw.split(",") if p])
        elif kind == "int_list":
            parser.add_argument(flag, dest=dest, type=lambda raw: [int(p) for p in raw.split(",") if p])
        else:
            parser.add_argument(flag, dest=dest, type=kind)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigensample",
        description="Estimate eigenvalue spectra from randomly sampled principal submatrices.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run an experiment and write CSV rows")
    run_parser.add_argument("config", nargs="?", help="flat key = value config file")
    _add_config_flags(run_parser)

    slope_parser = commands.add_parser("slope", help="fit log-log error slopes from a result CSV")
    slope_parser.add_argument("csv")
    slope_parser.add_argument("--sampler")
    slope_parser.add_argument("--target", type=int)

    spectrum_parser = commands.add_parser("spectrum", help="print the exact spectrum of a matrix spec")
    spectrum_parser.add_argument("matrix_spec")
    spectrum_parser.add_argument("--seed", type=int, default=0)

    bench_parser = commands.add_parser("bench", help="time each sampler once per repetition")
    bench_parser.add_argument("--matrix-spec", default="erdos_renyi:n=400,p=0.1")
    bench_parser.add_argument("--fraction", type=float, default=0.1)
    bench_parser.add_argument("--reps", type=int, default=3)
    bench_parser.add_argument("--seed", type=int, default=0)
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        dest: getattr(args, dest)
        for _, dest, _kind in _FLAG_KEYS
        if getattr(args, dest) is not None
    }
    if args.config:
        cfg = load_config(args.config)
        cfg = replace(cfg, **overrides)
    else:
        required = ("matrix_spec", "samplers", "sample_fractions", "trials", "target_indices", "seed")
        missing = [key for key in required if key not in overrides]
        if missing:
            raise ConfigError(missing[0], "missing (pass a config file or the matching flag)")
        cfg = ExperimentConfig(**overrides)
    return cfg


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    rows = run_experiment(cfg)
    if cfg.output_path:
        print(f"wrote {len(rows)} rows to {cfg.output_path}")
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_slope(args: argparse.Namespace) -> int:
    rows = read_csv(args.csv)
    if args.sampler is not None and args.target is not None:
        print(format(slope_fit(rows, args.sampler, args.target), ".17g"))
        return 0
    samplers = sorted({row.sampler for row in rows}) if args.sampler is None else [args.sampler]
    targets = sorted({row.target_index for row in rows}) if args.target is None else [args.target]
    print("sampler target slope")
    for sampler in samplers:
        for target in targets:
            try:
                value = format(slope_fit(rows, sampler, target), ".17g")
            except FitError:
                value = "nan"
            print(f"{sampler} {target} {value}")
    return 0


def _cmd_spectrum(args: argparse.Namespace) -> int:
    dense, _store, _source = build_matrix(args.matrix_spec, args.seed)
    values = sym_eigvals(dense).values + 0.0  # normalize negative zero for printing
    print(" ".join(format(v, ".17g") for v in values))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    dense, store, _source = build_matrix(args.matrix_spec, args.seed)
    cfg = ExperimentConfig(
        matrix_spec=args.matrix_spec,
        samplers=list(SAMPLER_NAMES),
        sample_fractions=[args.fraction],
        trials=1,
        target_indices=[1],
        seed=args.seed,
    )
    s = args.fraction * dense.n
    for sampler in SAMPLER_NAMES:
        started = time.perf_counter()
        for rep in range(max(args.reps, 1)):
            _run_one(sampler, dense, store, s, derive_seed(args.seed, "bench", sampler, rep), cfg)
        mean_ms = (time.perf_counter() - started) * 1000.0 / max(args.reps, 1)
        print(f"{sampler} {mean_ms:.3f} ms")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "run": _cmd_run,
        "slope": _cmd_slope,
        "spectrum": _cmd_spectrum,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (
        ConfigError,
        FitError,
        SolverFailureError,
        StoreConstructionError,
        EdgeListParseError,
        MatrixMarketFormatError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
