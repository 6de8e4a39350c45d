"""Experiment harness: configuration, deterministic runs, CSV rows, slope fits.

A run is a deterministic function of ``(config, seed)``: per-trial seeds are
derived by hashing the master seed with the sampler name, fraction index,
and trial index, so adding a sampler or fraction never perturbs the draws
of the others.  Wall-clock columns are the one exception to determinism.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import SolverFailureError, Spectrum, SymMatrix, sym_eigvals
from .estimate import (
    EstimateReport,
    estimate_entrywise_pipeline,
    estimate_nnz,
    estimate_norm,
    estimate_psd,
    estimate_singular_report,
    estimate_uniform,
)
from .matrices import (
    block_matrix,
    erdos_renyi,
    identity_matrix,
    load_edge_list,
    load_matrix_market,
    power_law_graph,
    synthetic_point_cloud,
    tanh_similarity,
    tensor_hard_instance,
    thin_plate_spline,
    tridiagonal_ones,
)
from .store import SparseSymStore

SAMPLER_NAMES = (
    "uniform",
    "nnz_practical",
    "nnz_theorem",
    "nnz_simple",
    "norm",
    "entrywise",
    "singular",
    "psd",
)
ZERO_BASELINE = "zero"


class ConfigError(ValueError):
    """A configuration field failed validation."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field {field_name!r}: {message}")
        self.field = field_name


class FitError(ValueError):
    """Not enough usable data points for a slope fit."""


@dataclass
class ExperimentConfig:
    """Inputs of one experiment.

    ``matrix_spec`` uses a small spec language: ``name:key=value,...`` for
    generated families or ``file:path`` for edge-list / MatrixMarket input.
    ``eps`` feeds theorem-mode zeroing, ``c2`` both zeroing rules, and
    ``entrywise_p`` the keep probability of the entrywise pipeline.
    """

    matrix_spec: str
    samplers: list[str]
    sample_fractions: list[float]
    trials: int
    target_indices: list[int]
    seed: int
    c2: float = 0.1
    eps: float = 0.5
    entrywise_p: float = 0.1
    output_path: str | None = None


@dataclass
class ResultRow:
    """One (sampler, fraction, trial, target) measurement."""

    experiment_id: str
    sampler: str
    n: int
    s: float
    sample_fraction: float
    trial: int
    seed: int
    target_index: int
    true_eig: float
    est_eig: float
    abs_err: float
    scaled_err: float
    zeroed_count: int
    sample_size: int
    elapsed_ms: float


CSV_FIELDS = tuple(f.name for f in fields(ResultRow))
_INT_FIELDS = {"n", "trial", "seed", "target_index", "zeroed_count", "sample_size"}
_FLOAT_FIELDS = {"s", "sample_fraction", "true_eig", "est_eig", "abs_err", "scaled_err", "elapsed_ms"}


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels; independent of hash randomization."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _parse_params(kind: str, text: str) -> dict[str, str]:
    params: dict[str, str] = {}
    if not text:
        return params
    for chunk in text.split(","):
        key, sep, value = chunk.partition("=")
        if not sep or not key or not value:
            raise ConfigError("matrix_spec", f"bad parameter {chunk!r} for {kind!r}")
        if key in params:
            raise ConfigError("matrix_spec", f"repeated parameter {key!r} for {kind!r}")
        params[key] = value
    return params


def _take(params: dict[str, str], kind: str, key: str, cast) -> float:
    if key not in params:
        raise ConfigError("matrix_spec", f"{kind!r} requires parameter {key!r}")
    raw = params.pop(key)
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError("matrix_spec", f"parameter {key}={raw!r} is not a {cast.__name__}") from None


def build_matrix(spec: str, seed: int) -> tuple[SymMatrix, SparseSymStore, Path | None]:
    """Materialize a matrix spec as both a dense matrix and a sparse store.

    Generated families draw their randomness from a stream derived from
    ``seed`` and the spec text.  File-backed matrices also return their
    path so the exact spectrum can be cached beside them.
    """
    kind, _, rest = spec.partition(":")
    if kind == "file":
        if not rest:
            raise ConfigError("matrix_spec", "file spec needs a path")
        path = Path(rest)
        store = load_matrix_market(path) if path.suffix == ".mtx" else load_edge_list(path)
        return store.to_dense(), store, path

    params = _parse_params(kind, rest)
    rng = np.random.default_rng(derive_seed(seed, "matrix", spec))
    dense: SymMatrix | None = None
    store: SparseSymStore | None = None
    if kind == "block":
        dense = block_matrix(int(_take(params, kind, "n", int)), int(_take(params, kind, "k", int)))
    elif kind == "identity":
        dense = identity_matrix(int(_take(params, kind, "n", int)))
    elif kind == "erdos_renyi":
        store = erdos_renyi(int(_take(params, kind, "n", int)), _take(params, kind, "p", float), rng)
    elif kind == "power_law":
        store = power_law_graph(
            int(_take(params, kind, "n", int)), _take(params, kind, "exponent", float), rng
        )
    elif kind == "tanh":
        dense = tanh_similarity(synthetic_point_cloud(int(_take(params, kind, "n", int)), rng))
    elif kind == "thin_plate":
        dense = thin_plate_spline(synthetic_point_cloud(int(_take(params, kind, "n", int)), rng))
    elif kind == "tridiagonal":
        store = tridiagonal_ones(int(_take(params, kind, "n", int)))
    elif kind == "tensor":
        dense = tensor_hard_instance(
            int(_take(params, kind, "m", int)), int(_take(params, kind, "block", int)), rng
        )
    else:
        raise ConfigError("matrix_spec", f"unknown matrix kind {kind!r}")
    if params:
        raise ConfigError("matrix_spec", f"unknown parameters {sorted(params)} for {kind!r}")
    if dense is None:
        dense = store.to_dense()
    if store is None:
        store = SparseSymStore.from_dense(dense)
    return dense, store, None


def validate_config(cfg: ExperimentConfig) -> None:
    if not cfg.matrix_spec:
        raise ConfigError("matrix_spec", "must be nonempty")
    if not cfg.samplers:
        raise ConfigError("samplers", "must list at least one sampler")
    for name in cfg.samplers:
        if name not in SAMPLER_NAMES:
            raise ConfigError("samplers", f"unknown sampler {name!r}, expected one of {SAMPLER_NAMES}")
    if len(set(cfg.samplers)) != len(cfg.samplers):
        raise ConfigError("samplers", "sampler names must be distinct")
    if not cfg.sample_fractions:
        raise ConfigError("sample_fractions", "must list at least one fraction")
    for f in cfg.sample_fractions:
        if not 0 < f <= 1:
            raise ConfigError("sample_fractions", f"fractions must lie in (0, 1], got {f}")
    if len(set(cfg.sample_fractions)) != len(cfg.sample_fractions):
        raise ConfigError("sample_fractions", "fractions must be distinct")
    if cfg.trials < 1:
        raise ConfigError("trials", f"must be at least 1, got {cfg.trials}")
    if not cfg.target_indices:
        raise ConfigError("target_indices", "must list at least one index")
    for t in cfg.target_indices:
        if t == 0:
            raise ConfigError("target_indices", "indices are 1-based; 0 is invalid")
    if not cfg.c2 > 0:
        raise ConfigError("c2", f"must be positive, got {cfg.c2}")
    if not cfg.eps > 0:
        raise ConfigError("eps", f"must be positive, got {cfg.eps}")
    if not 0 < cfg.entrywise_p <= 1:
        raise ConfigError("entrywise_p", f"must lie in (0, 1], got {cfg.entrywise_p}")


def _resolve_targets(target_indices: Sequence[int], n: int) -> list[int]:
    """Map 1-based indices (negatives count from the smallest end) to 1..n."""
    resolved = []
    for t in target_indices:
        actual = t if t > 0 else n + 1 + t
        if not 1 <= actual <= n:
            raise ConfigError("target_indices", f"index {t} out of range for dimension {n}")
        resolved.append(actual)
    return resolved


def _exact_spectrum(dense: SymMatrix, source: Path | None) -> Spectrum:
    """Exact eigenvalues, cached beside file-backed matrices by content hash."""
    if source is None:
        return sym_eigvals(dense)
    digest = hashlib.blake2b(source.read_bytes(), digest_size=16).hexdigest()
    cache = source.with_name(source.name + ".spectrum.json")
    if cache.exists():
        try:
            payload = json.loads(cache.read_text())
            if payload.get("content_hash") == digest:
                return Spectrum(np.asarray(payload["values"], dtype=np.float64))
        except (ValueError, KeyError):
            pass
    spec = sym_eigvals(dense)
    cache.write_text(json.dumps({"content_hash": digest, "values": spec.values.tolist()}))
    return spec


def _run_one(
    sampler: str,
    dense: SymMatrix,
    store: SparseSymStore,
    s: float,
    seed: int,
    cfg: ExperimentConfig,
) -> EstimateReport:
    if sampler == "uniform":
        return estimate_uniform(dense, s, seed)
    if sampler == "nnz_practical":
        return estimate_nnz(store, s, seed, zeroing="practical", c2=cfg.c2)
    if sampler == "nnz_theorem":
        return estimate_nnz(store, s, seed, zeroing="theorem", eps=cfg.eps, c2=cfg.c2)
    if sampler == "nnz_simple":
        return estimate_nnz(store, s, seed, zeroing="off")
    if sampler == "norm":
        return estimate_norm(store, s, seed, zeroing="theorem", eps=cfg.eps, c2=cfg.c2)
    if sampler == "entrywise":
        return estimate_entrywise_pipeline(dense, s, cfg.entrywise_p, seed)
    if sampler == "singular":
        return estimate_singular_report(dense, s, seed)
    if sampler == "psd":
        return estimate_psd(dense, s, seed)
    raise ConfigError("samplers", f"unknown sampler {sampler!r}")


def _experiment_id(cfg: ExperimentConfig) -> str:
    label = "|".join(
        [
            cfg.matrix_spec,
            ",".join(cfg.samplers),
            ",".join(format(f, ".17g") for f in cfg.sample_fractions),
            str(cfg.trials),
            ",".join(str(t) for t in cfg.target_indices),
            str(cfg.seed),
            format(cfg.c2, ".17g"),
            format(cfg.eps, ".17g"),
            format(cfg.entrywise_p, ".17g"),
        ]
    )
    return hashlib.blake2b(label.encode(), digest_size=6).hexdigest()


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every (sampler, fraction, trial) cell and emit one row per target.

    A zero-estimate baseline is appended after the configured samplers so
    downstream plots can show the trivial estimator's error.  A solver
    failure inside one cell yields NaN measurement columns for that cell
    and the run continues.  Rows are ordered by (sampler, fraction, trial,
    target) following the order given in the config.
    """
    validate_config(cfg)
    dense, store, source = build_matrix(cfg.matrix_spec, cfg.seed)
    n = dense.n
    targets = _resolve_targets(cfg.target_indices, n)
    exact = _exact_spectrum(dense, source)
    abs_sorted = Spectrum(np.sort(np.abs(exact.values))[::-1])
    err_scale = math.sqrt(store.total_nnz) if store.total_nnz else 1.0
    experiment_id = _experiment_id(cfg)

    rows: list[ResultRow] = []
    for sampler in list(cfg.samplers) + [ZERO_BASELINE]:
        truth = abs_sorted if sampler == "singular" else exact
        for fraction_index, fraction in enumerate(cfg.sample_fractions):
            s = fraction * n
            for trial in range(cfg.trials):
                if sampler == ZERO_BASELINE:
                    seed = 0
                    estimates: Spectrum | None = Spectrum(np.zeros(n))
                    sample_size = zeroed = 0
                    elapsed_ms = 0.0
                else:
                    seed = derive_seed(cfg.seed, sampler, fraction_index, trial)
                    try:
                        report = _run_one(sampler, dense, store, s, seed, cfg)
                    except SolverFailureError:
                        estimates = None
                        sample_size = zeroed = 0
                        elapsed_ms = 0.0
                    else:
                        estimates = report.estimates
                        sample_size = report.sample_size
                        zeroed = report.zeroed_count
                        elapsed_ms = report.elapsed * 1000.0
                for target in targets:
                    true_value = float(truth[target - 1])
                    if estimates is None:
                        est = abs_err = scaled = math.nan
                    else:
                        est = float(estimates[target - 1])
                        abs_err = abs(est - true_value)
                        scaled = abs_err / err_scale
                    rows.append(
                        ResultRow(
                            experiment_id=experiment_id,
                            sampler=sampler,
                            n=n,
                            s=s,
                            sample_fraction=fraction,
                            trial=trial,
                            seed=seed,
                            target_index=target,
                            true_eig=true_value,
                            est_eig=est,
                            abs_err=abs_err,
                            scaled_err=scaled,
                            zeroed_count=zeroed,
                            sample_size=sample_size,
                            elapsed_ms=elapsed_ms,
                        )
                    )
    if cfg.output_path:
        write_csv(rows, cfg.output_path)
    return rows


def _format_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(rows: Iterable[ResultRow], path_or_handle: str | Path | TextIO) -> None:
    """Write rows in schema order; floats carry 17 significant digits."""
    if hasattr(path_or_handle, "write"):
        _write_csv_handle(rows, path_or_handle)
        return
    with open(path_or_handle, "w", newline="") as handle:
        _write_csv_handle(rows, handle)


def _write_csv_handle(rows: Iterable[ResultRow], handle: TextIO) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([_format_cell(getattr(row, name)) for name in CSV_FIELDS])


def read_csv(path_or_handle: str | Path | TextIO) -> list[ResultRow]:
    """Read rows written by :func:`write_csv`."""
    if hasattr(path_or_handle, "read"):
        return _read_csv_handle(path_or_handle, "<stream>")
    with open(path_or_handle, newline="") as handle:
        return _read_csv_handle(handle, str(path_or_handle))


def _read_csv_handle(handle: TextIO, label: str) -> list[ResultRow]:
    rows: list[ResultRow] = []
    reader = csv.DictReader(handle)
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_FIELDS:
        raise ValueError(f"{label}: unexpected CSV header {reader.fieldnames}")
    for record in reader:
        kwargs = {}
        for name in CSV_FIELDS:
            raw = record[name]
            if name in _INT_FIELDS:
                kwargs[name] = int(raw)
            elif name in _FLOAT_FIELDS:
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
        rows.append(ResultRow(**kwargs))
    return rows


def slope_fit(rows: Iterable[ResultRow], sampler: str, target_index: int) -> float:
    """Least-squares slope of log mean scaled error against log fraction.

    Fractions whose mean scaled error is zero contribute no usable point;
    at least three distinct usable fractions are required.
    """
    grouped: dict[float, list[float]] = {}
    for row in rows:
        if row.sampler == sampler and row.target_index == target_index and not math.isnan(row.scaled_err):
            grouped.setdefault(row.sample_fraction, []).append(row.scaled_err)
    points = [
        (math.log(fraction), math.log(mean))
        for fraction, errs in sorted(grouped.items())
        if (mean := float(np.mean(errs))) > 0.0
    ]
    if len(points) < 3:
        raise FitError(
            f"need at least 3 fractions with positive mean error for {sampler!r}"
            f" target {target_index}, got {len(points)}"
        )
    xs, ys = zip(*points)
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


_CONFIG_KEYS = {
    "matrix_spec": str,
    "samplers": "str_list",
    "sample_fractions": "float_list",
    "trials": int,
    "target_indices": "int_list",
    "seed": int,
    "c2": float,
    "eps": float,
    "entrywise_p": float,
    "output_path": str,
}
_REQUIRED_KEYS = ("matrix_spec", "samplers", "sample_fractions", "trials", "target_indices", "seed")


def _convert_value(key: str, raw: str):
    kind = _CONFIG_KEYS[key]
    try:
        if kind == "str_list":
            return [part.strip() for part in raw.split(",") if part.strip()]
        if kind == "float_list":
            return [float(part) for part in raw.split(",") if part.strip()]
        if kind == "int_list":
            return [int(part) for part in raw.split(",") if part.strip()]
        return kind(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse value {raw!r}") from None


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format.

    Lists are comma-separated; blank lines and ``#`` comments are ignored.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = (part.strip() for part in stripped.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {stripped!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(key, "unknown configuration key")
        if key in values:
            raise ConfigError(key, "configuration key repeated")
        values[key] = _convert_value(key, raw)
    missing = [key for key in _REQUIRED_KEYS if key not in values]
    if missing:
        raise ConfigError(missing[0], "required key missing")
    cfg = ExperimentConfig(**values)  # type: ignore[arg-type]
    validate_config(cfg)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())
