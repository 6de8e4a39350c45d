"""Full-spectrum estimates assembled from sampled submatrices.

Each estimator seeds its own generator, so a report is reproducible from
``(seed, parameters)`` alone; only the ``elapsed`` field varies across runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import DimensionMismatchError, SolverFailureError, Spectrum, SymMatrix, sym_eigvals
from .sampling import (
    DEFAULT_C2,
    RowColSample,
    SampledSubmatrix,
    _sparsify_counted,
    nnz_submatrix,
    norm_submatrix,
    rowcol_submatrix,
    uniform_submatrix,
)
from .store import SparseSymStore


@dataclass(frozen=True)
class EstimateReport:
    """One estimator run: the aligned spectrum plus its provenance.

    ``sample_size`` is the realized number of sampled indices, ``s`` the
    expected one.  ``positive_count`` is how many submatrix eigenvalues
    landed in the nonnegative branch of the alignment.  ``entries_read``
    is filled only by the entrywise pipeline.
    """

    estimates: Spectrum
    sampler: str
    s: float
    sample_size: int
    zeroed_count: int
    seed: int
    positive_count: int
    elapsed: float
    entries_read: int | None = None


def align_estimates(sub_eigs: Spectrum, n: int, scale: float) -> Spectrum:
    """Place scaled submatrix eigenvalues into a length-``n`` spectrum.

    Nonnegative values keep their positions at the top; the k-th most
    negative value lands k slots from the bottom; everything between is
    zero.  With ``m == n`` this is the identity placement.
    """
    m = len(sub_eigs)
    if m > n:
        raise DimensionMismatchError(f"cannot align {m} values into {n} slots")
    out = np.zeros(n)
    vals = sub_eigs.values
    num_pos = int(np.count_nonzero(vals >= 0))
    out[:num_pos] = scale * vals[:num_pos]
    if num_pos < m:
        out[n - m + num_pos:] = scale * vals[num_pos:]
    return Spectrum(out)


def _submatrix_eigs(sub: SampledSubmatrix, tol: float) -> Spectrum:
    if sub.matrix is None:
        return Spectrum(np.zeros(0))
    return sym_eigvals(sub.matrix, tol)


def _report(
    sampler: str,
    sub: SampledSubmatrix,
    eigs: Spectrum,
    n: int,
    scale: float,
    s: float,
    seed: int,
    started: float,
    entries_read: int | None = None,
) -> EstimateReport:
    return EstimateReport(
        estimates=align_estimates(eigs, n, scale),
        sampler=sampler,
        s=s,
        sample_size=len(sub.sample),
        zeroed_count=sub.zeroed_count,
        seed=seed,
        positive_count=int(np.count_nonzero(eigs.values >= 0)),
        elapsed=time.perf_counter() - started,
        entries_read=entries_read,
    )


def estimate_uniform(matrix: SymMatrix, s: float, seed: int, tol: float = 1e-10) -> EstimateReport:
    """Estimate all eigenvalues from one uniformly sampled principal submatrix.

    Submatrix eigenvalues are scaled by ``n / s`` and aligned.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    sub = uniform_submatrix(matrix, s, rng)
    eigs = _submatrix_eigs(sub, tol)
    return _report("uniform", sub, eigs, matrix.n, matrix.n / s, s, seed, started)


def estimate_nnz(
    store: SparseSymStore,
    s: float,
    seed: int,
    *,
    zeroing: str = "practical",
    eps: float | None = None,
    c2: float = DEFAULT_C2,
    tol: float = 1e-10,
) -> EstimateReport:
    """Estimate all eigenvalues via sparsity-proportional row sampling.

    The importance rescaling lives inside the sampled submatrix, so the
    aligned eigenvalues carry scale one.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    sub = nnz_submatrix(store, s, rng, zeroing=zeroing, eps=eps, c2=c2)
    eigs = _submatrix_eigs(sub, tol)
    return _report("nnz", sub, eigs, store.n, 1.0, s, seed, started)


def estimate_norm(
    store: SparseSymStore,
    s: float,
    seed: int,
    *,
    zeroing: str,
    eps: float | None = None,
    c2: float = DEFAULT_C2,
    tol: float = 1e-10,
) -> EstimateReport:
    """Estimate all eigenvalues via squared-row-norm sampling."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    sub = norm_submatrix(store, s, rng, zeroing=zeroing, eps=eps, c2=c2)
    eigs = _submatrix_eigs(sub, tol)
    return _report("norm", sub, eigs, store.n, 1.0, s, seed, started)


def estimate_psd(
    matrix: SymMatrix,
    s: float,
    seed: int,
    *,
    check_psd: bool = False,
    tol: float = 1e-10,
) -> EstimateReport:
    """Estimate the eigenvalues of a positive semidefinite matrix.

    Only the nonnegative submatrix eigenvalues are kept (scaled by
    ``n / s``); negative ones are noise for a PSD input and are dropped.
    ``check_psd`` verifies the precondition at full eigendecomposition
    cost and is meant for tests.
    """
    started = time.perf_counter()
    if check_psd:
        full = sym_eigvals(matrix, tol)
        if full.values[-1] < -tol * max(1.0, abs(full.values[0])):
            raise ValueError("matrix is not positive semidefinite")
    rng = np.random.default_rng(seed)
    sub = uniform_submatrix(matrix, s, rng)
    eigs = _submatrix_eigs(sub, tol)
    kept = Spectrum(eigs.values[eigs.values >= 0])
    return _report("psd", sub, kept, matrix.n, matrix.n / s, s, seed, started)


def _singular_values(sample: RowColSample, n: int) -> Spectrum:
    rows, cols = sample.row_indices.size, sample.col_indices.size
    if rows == 0 or cols == 0:
        return Spectrum(np.zeros(n))
    try:
        svals = np.linalg.svd(sample.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(f"singular value solver did not converge: {exc}") from exc
    out = np.zeros(n)
    out[: svals.size] = svals
    return Spectrum(out)


def estimate_singular(matrix: SymMatrix, s: float, seed: int) -> Spectrum:
    """Estimate all singular values from an independently sampled row/column slice.

    Returns ``min(rows, cols)`` singular values of the scaled slice padded
    with zeros to length ``n``.
    """
    return estimate_singular_report(matrix, s, seed).estimates


def estimate_singular_report(matrix: SymMatrix, s: float, seed: int) -> EstimateReport:
    """Like :func:`estimate_singular` but with full run bookkeeping."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    sample = rowcol_submatrix(matrix, s, rng)
    spec = _singular_values(sample, matrix.n)
    return EstimateReport(
        estimates=spec,
        sampler="singular",
        s=s,
        sample_size=int(sample.row_indices.size + sample.col_indices.size),
        zeroed_count=0,
        seed=seed,
        positive_count=len(spec),
        elapsed=time.perf_counter() - started,
    )


def estimate_entrywise_pipeline(
    matrix: SymMatrix,
    s: float,
    p: float,
    seed: int,
    tol: float = 1e-10,
) -> EstimateReport:
    """Uniform submatrix sampling followed by entrywise sparsification.

    Only the diagonal of the submatrix and the off-diagonal pairs whose
    coins came up are ever read; ``entries_read`` counts exactly those, one
    per kept pair, and is at most ``|S| + |S|**2``.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    sub = uniform_submatrix(matrix, s, rng)
    if sub.matrix is None:
        eigs = Spectrum(np.zeros(0))
        return _report("entrywise", sub, eigs, matrix.n, matrix.n / s, s, seed, started, entries_read=0)
    sparse, kept_pairs = _sparsify_counted(sub.matrix, p, rng)
    eigs = sym_eigvals(sparse, tol)
    read = len(sub.sample) + kept_pairs
    return _report("entrywise", sub, eigs, matrix.n, matrix.n / s, s, seed, started, entries_read=read)


SpectrumSource = Callable[[int], Union[Spectrum, EstimateReport]]


def median_boost(run: SpectrumSource, trials: int) -> Spectrum:
    """Coordinate-wise median over ``trials`` independent estimates.

    ``run`` maps a trial index to a spectrum (or a report carrying one);
    derive per-trial seeds from the index to keep trials independent.  The
    median spectrum is re-sorted, since coordinate medians of sorted inputs
    can fall out of order.  ``trials`` must be odd so the median is an
    actual sample value per coordinate.
    """
    if trials < 1 or trials % 2 == 0:
        raise ValueError(f"trials must be odd and at least 1, got {trials}")
    stack = []
    width = None
    for t in range(trials):
        result = run(t)
        spec = result.estimates if isinstance(result, EstimateReport) else result
        if width is None:
            width = len(spec)
        elif len(spec) != width:
            raise DimensionMismatchError("trial spectra have inconsistent lengths")
        stack.append(spec.values)
    median = np.median(np.stack(stack), axis=0)
    return Spectrum(np.sort(median)[::-1])


def recommended_sample_size(kind: str, n: int, eps: float, delta: float, c: float = 1.0) -> float:
    """Sample-size guidance from the sufficient conditions behind each sampler.

    These are asymptotic sufficient bounds with unspecified constants; they
    are exposed for orientation only and none of the estimators consult
    them.  ``kind`` is one of ``uniform``, ``nnz``, ``norm``, ``psd``,
    ``singular``, or ``entrywise_p`` (the last returns a keep probability,
    not a sample count).
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ValueError("eps and delta must lie in (0, 1)")
    ln = math.log(max(n, 2))
    if kind == "uniform":
        return c * math.log(1.0 / (eps * delta)) * ln**3 / (eps**3 * delta)
    if kind == "nnz":
        return c * ln**8 / (eps**8 * delta**4)
    if kind == "norm":
        return c * ln**10 / (eps**8 * delta**4)
    if kind == "psd":
        return 2.0 / (eps**2 * delta)
    if kind == "singular":
        return c * math.log(n / delta) / eps**2
    if kind == "entrywise_p":
        return min(1.0, c * math.log(n / delta) / (n * eps**2))
    raise ValueError(f"unknown sampler kind {kind!r}")
