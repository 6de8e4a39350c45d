"""Randomized submatrix extraction, probability rescaling, and zeroing rules.

All samplers consume a ``numpy.random.Generator`` and draw their inclusion
coins in a single vectorized call, so two samplers seeded identically and
given identical inclusion probabilities select identical index sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SymMatrix
from .store import SparseSymStore

ZEROING_MODES = ("theorem", "practical", "off")
DEFAULT_C2 = 0.1


@dataclass(frozen=True)
class SampleSet:
    """Sorted distinct row indices with the probabilities they were kept at."""

    indices: np.ndarray
    probs: np.ndarray
    mode: str

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        pr = np.asarray(self.probs, dtype=np.float64)
        if idx.ndim != 1 or pr.shape != idx.shape:
            raise ValueError("indices and probs must be one-dimensional and equally long")
        if idx.size and np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if np.any(pr <= 0) or np.any(pr > 1):
            raise ValueError("inclusion probabilities must lie in (0, 1]")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "probs", pr)

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class SampledSubmatrix:
    """A principal submatrix plus the bookkeeping the estimators need.

    ``matrix`` is ``None`` exactly when the sample came out empty.
    ``zeroed_count`` counts entries a zeroing rule actually set to zero,
    one per unordered pair and one per diagonal position.
    ``scale_applied`` records whether entries carry the ``1/sqrt(p_i p_j)``
    importance rescaling.
    """

    sample: SampleSet
    matrix: SymMatrix | None
    zeroed_count: int
    scale_applied: str

    def __post_init__(self) -> None:
        if self.scale_applied not in ("none", "inverse_sqrt_prob"):
            raise ValueError(f"unknown scale tag {self.scale_applied!r}")
        have = 0 if self.matrix is None else self.matrix.n
        if have != len(self.sample):
            raise ValueError(f"matrix dimension {have} does not match sample size {len(self.sample)}")


@dataclass(frozen=True)
class RowColSample:
    """Independently sampled rows and columns with entries scaled by n/s."""

    matrix: np.ndarray
    row_indices: np.ndarray
    col_indices: np.ndarray


def _validate_zeroing(zeroing: str, allowed: tuple[str, ...], eps: float | None, c2: float) -> None:
    if zeroing not in allowed:
        raise ValueError(f"unknown zeroing mode {zeroing!r}, expected one of {allowed}")
    if zeroing == "theorem" and (eps is None or not eps > 0):
        raise ValueError("theorem zeroing needs a positive eps")
    if zeroing != "off" and not c2 > 0:
        raise ValueError(f"c2 must be positive, got {c2}")


def _log_sq(n: int) -> float:
    # the n = 1 threshold degenerates; an infinite cutoff zeroes everything
    ln = math.log(n)
    return ln * ln if ln > 0 else 0.0


def _sparsity_cutoff(store: SparseSymStore, s: float, eps: float | None, zeroing: str, c2: float) -> float:
    if zeroing == "practical":
        return store.total_nnz / (c2 * s)
    lsq = _log_sq(store.n)
    if lsq == 0.0:
        return math.inf
    return eps * eps * store.total_nnz / (c2 * lsq)


def uniform_submatrix(matrix: SymMatrix, s: float, rng: np.random.Generator) -> SampledSubmatrix:
    """Keep each index independently with probability ``s / n``.

    ``s`` is the expected number of sampled indices and may be fractional;
    ``s == n`` keeps everything.  Entries are returned unscaled.
    """
    n = matrix.n
    if not 0 < s <= n:
        raise ValueError(f"s must lie in (0, {n}], got {s}")
    prob = s / n
    mask = rng.random(n) < prob
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        sample = SampleSet(idx, np.zeros(0), "uniform")
        return SampledSubmatrix(sample, None, 0, "none")
    sub = SymMatrix(matrix.entries[np.ix_(idx, idx)])
    sample = SampleSet(idx, np.full(idx.size, prob), "uniform")
    return SampledSubmatrix(sample, sub, 0, "none")


def _extract_dense(store: SparseSymStore, idx: np.ndarray) -> np.ndarray:
    pos = {int(i): a for a, i in enumerate(idx)}
    out = np.zeros((idx.size, idx.size))
    for a, i in enumerate(idx):
        cols, vals = store.row_entries(int(i))
        for j, v in zip(cols, vals):
            b = pos.get(j)
            if b is not None:
                out[a, b] = v
    return out


def _count_zeroed(raw: np.ndarray, kill: np.ndarray) -> int:
    upper = np.triu(np.ones(raw.shape, dtype=bool))
    return int(np.count_nonzero(kill & (raw != 0.0) & upper))


def nnz_submatrix(
    store: SparseSymStore,
    s: float,
    rng: np.random.Generator,
    *,
    zeroing: str = "practical",
    eps: float | None = None,
    c2: float = DEFAULT_C2,
) -> SampledSubmatrix:
    """Sample rows proportionally to their nonzero counts and rescale.

    Row ``i`` is kept with probability ``min(1, s * nnz_i / total_nnz)`` and
    the surviving entries are scaled by ``1 / sqrt(p_i p_j)``.  The zeroing
    rule then drops every diagonal entry plus any off-diagonal pair whose
    row sparsities multiply below a cutoff: ``eps**2 * total_nnz /
    (c2 * ln(n)**2)`` in ``theorem`` mode, ``total_nnz / (c2 * s)`` in
    ``practical`` mode.  ``off`` zeroes nothing.
    """
    _validate_zeroing(zeroing, ZEROING_MODES, eps, c2)
    probs = store.inclusion_probs(s, "by_nnz")
    mask = rng.random(store.n) < probs
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return SampledSubmatrix(SampleSet(idx, np.zeros(0), "by_nnz"), None, 0, "inverse_sqrt_prob")
    kept = probs[idx]
    raw = _extract_dense(store, idx)
    scaled = raw * np.outer(1.0 / np.sqrt(kept), 1.0 / np.sqrt(kept))
    zeroed = 0
    if zeroing != "off":
        cutoff = _sparsity_cutoff(store, s, eps, zeroing, c2)
        counts = store.row_nnz[idx].astype(np.float64)
        kill = np.outer(counts, counts) < cutoff
        np.fill_diagonal(kill, True)
        zeroed = _count_zeroed(raw, kill)
        scaled[kill] = 0.0
    sample = SampleSet(idx, kept, "by_nnz")
    return SampledSubmatrix(sample, SymMatrix(scaled), zeroed, "inverse_sqrt_prob")


def norm_submatrix(
    store: SparseSymStore,
    s: float,
    rng: np.random.Generator,
    *,
    zeroing: str,
    eps: float | None = None,
    c2: float = DEFAULT_C2,
) -> SampledSubmatrix:
    """Sample rows proportionally to their squared norms and rescale.

    Row ``i`` is kept with probability ``min(1, s * sqnorm_i / frob_sq +
    1/n**2)`` and surviving entries are scaled by ``1 / sqrt(p_i p_j)``.
    In ``theorem`` mode a diagonal entry is dropped when its row carries
    less than ``eps**2 / 4`` of the squared Frobenius mass, and an
    off-diagonal entry when ``sqnorm_i * sqnorm_j < eps**2 * frob_sq *
    a_ij**2 / (c2 * ln(n)**4)``, evaluated on the unscaled value.
    """
    _validate_zeroing(zeroing, ("theorem", "off"), eps, c2)
    if store.frob_sq == 0.0:
        empty = np.zeros(0)
        return SampledSubmatrix(SampleSet(empty, empty, "by_sqnorm"), None, 0, "inverse_sqrt_prob")
    probs = store.inclusion_probs(s, "by_sqnorm")
    mask = rng.random(store.n) < probs
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return SampledSubmatrix(SampleSet(idx, np.zeros(0), "by_sqnorm"), None, 0, "inverse_sqrt_prob")
    kept = probs[idx]
    raw = _extract_dense(store, idx)
    scaled = raw * np.outer(1.0 / np.sqrt(kept), 1.0 / np.sqrt(kept))
    zeroed = 0
    if zeroing == "theorem":
        sq = store.row_sqnorm[idx]
        lsq = _log_sq(store.n)
        if lsq == 0.0:
            kill = np.ones(raw.shape, dtype=bool)
        else:
            cutoff = eps * eps * store.frob_sq / (c2 * lsq * lsq)
            kill = np.outer(sq, sq) < cutoff * np.square(raw)
        diag_kill = sq < (eps * eps / 4.0) * store.frob_sq
        np.fill_diagonal(kill, diag_kill)
        zeroed = _count_zeroed(raw, kill)
        scaled[kill] = 0.0
    sample = SampleSet(idx, kept, "by_sqnorm")
    return SampledSubmatrix(sample, SymMatrix(scaled), zeroed, "inverse_sqrt_prob")


def _sparsify_counted(matrix: SymMatrix, p: float, rng: np.random.Generator) -> tuple[SymMatrix, int]:
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    n = matrix.n
    upper_i, upper_j = np.triu_indices(n, k=1)
    keep = rng.random(upper_i.size) < p
    sparse = np.zeros((n, n))
    ki, kj = upper_i[keep], upper_j[keep]
    sparse[ki, kj] = matrix.entries[ki, kj] / p
    np.fill_diagonal(sparse, np.diagonal(matrix.entries))
    return SymMatrix(sparse), int(np.count_nonzero(keep))


def entrywise_sparsify(matrix: SymMatrix, p: float, rng: np.random.Generator) -> SymMatrix:
    """Keep each off-diagonal pair with one coin at probability ``p``.

    Kept pairs are scaled by ``1/p`` in both mirror positions; the diagonal
    is copied exactly.  The result is an unbiased estimate of ``matrix``.
    """
    sparse, _ = _sparsify_counted(matrix, p, rng)
    return sparse


def rowcol_submatrix(matrix: SymMatrix, s: float, rng: np.random.Generator) -> RowColSample:
    """Sample rows and columns independently, each with probability ``s / n``.

    Row and column coins are separate draws, so the result is a rectangular
    slice.  Each surviving entry is scaled by ``sqrt(n/s)`` per side, hence
    ``n/s`` overall.
    """
    n = matrix.n
    if not 0 < s <= n:
        raise ValueError(f"s must lie in (0, {n}], got {s}")
    prob = s / n
    rows = np.flatnonzero(rng.random(n) < prob)
    cols = np.flatnonzero(rng.random(n) < prob)
    sliced = (n / s) * matrix.entries[np.ix_(rows, cols)]
    sliced.flags.writeable = False
    return RowColSample(sliced, rows, cols)


def zero_out_by_sparsity(store: SparseSymStore, eps: float, c2: float) -> SymMatrix:
    """Apply the sparsity zeroing rule to the whole matrix.

    Returns a dense copy with the diagonal removed along with every entry
    whose row nonzero counts multiply below
    ``eps**2 * total_nnz / (c2 * ln(n)**2)``.
    """
    if not eps > 0 or not c2 > 0:
        raise ValueError("eps and c2 must be positive")
    dense = store.to_dense().entries.copy()
    lsq = _log_sq(store.n)
    cutoff = math.inf if lsq == 0.0 else eps * eps * store.total_nnz / (c2 * lsq)
    counts = store.row_nnz.astype(np.float64)
    kill = np.outer(counts, counts) < cutoff
    np.fill_diagonal(kill, True)
    dense[kill] = 0.0
    return SymMatrix(dense)


def zero_out_by_norm(store: SparseSymStore, eps: float, c2: float) -> SymMatrix:
    """Apply the norm zeroing rule to the whole matrix.

    Diagonal entries of rows carrying less than ``eps**2 / 4`` of the
    squared Frobenius mass are removed, as is every off-diagonal entry with
    ``sqnorm_i * sqnorm_j < eps**2 * frob_sq * a_ij**2 / (c2 * ln(n)**4)``.
    """
    if not eps > 0 or not c2 > 0:
        raise ValueError("eps and c2 must be positive")
    dense = store.to_dense().entries.copy()
    sq = store.row_sqnorm
    lsq = _log_sq(store.n)
    if lsq == 0.0:
        kill = np.ones(dense.shape, dtype=bool)
    else:
        cutoff = eps * eps * store.frob_sq / (c2 * lsq * lsq)
        kill = np.outer(sq, sq) < cutoff * np.square(dense)
    np.fill_diagonal(kill, sq < (eps * eps / 4.0) * store.frob_sq)
    dense[kill] = 0.0
    return SymMatrix(dense)
