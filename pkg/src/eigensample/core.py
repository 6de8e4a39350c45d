"""Dense symmetric matrices, an exact eigenvalue oracle, and spectrum metrics.

Everything here is a pure function of immutable values: matrices and spectra
are frozen after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10


class SolverFailureError(RuntimeError):
    """The eigensolver did not converge within its iteration budget."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible dimensions."""


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix.

    The constructor copies the upper triangle onto the lower one, so
    ``entries[i, j] == entries[j, i]`` holds bitwise even when the input
    comes from a noisy source such as an accumulated matrix product.
    Entries must be finite.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.entries, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise DimensionMismatchError(f"expected a square array, got shape {raw.shape}")
        if raw.shape[0] < 1:
            raise DimensionMismatchError("matrix dimension must be positive")
        if not np.all(np.isfinite(raw)):
            raise ValueError("matrix entries must be finite")
        sym = np.triu(raw) + np.triu(raw, 1).T
        sym.flags.writeable = False
        object.__setattr__(self, "entries", sym)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def _check_same_dim(self, other: SymMatrix) -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: SymMatrix) -> SymMatrix:
        self._check_same_dim(other)
        return SymMatrix(self.entries + other.entries)

    def __sub__(self, other: SymMatrix) -> SymMatrix:
        self._check_same_dim(other)
        return SymMatrix(self.entries - other.entries)


@dataclass(frozen=True)
class Spectrum:
    """A list of real values sorted in non-increasing order.

    Used for eigenvalues and singular values alike.  May be empty, which is
    what the spectrum of an empty submatrix looks like.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 1:
            raise DimensionMismatchError("spectrum values must be one-dimensional")
        if vals.size:
            if not np.all(np.isfinite(vals)):
                raise ValueError("spectrum values must be finite")
            if np.any(np.diff(vals) > 0):
                raise ValueError("spectrum values must be non-increasing")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, index):
        return self.values[index]

    def __iter__(self):
        return iter(self.values)


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")


def sym_eigvals(matrix: SymMatrix, tol: float = DEFAULT_TOL) -> Spectrum:
    """All eigenvalues of ``matrix``, largest first.

    ``tol`` is the relative residual budget the solver is held to: every
    implicit eigenpair satisfies ``||A v - t v|| <= tol * ||A||_F``.  The
    default is far looser than what the underlying LAPACK path delivers;
    the parameter exists so callers can tighten the contract they rely on.

    Raises :class:`SolverFailureError` if the solver does not converge.
    """
    _check_tol(tol)
    try:
        ascending = np.linalg.eigvalsh(matrix.entries)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(f"eigensolver did not converge: {exc}") from exc
    return Spectrum(ascending[::-1])


def spectral_norm(matrix: SymMatrix, tol: float = DEFAULT_TOL) -> float:
    """The operator norm, i.e. the largest absolute eigenvalue."""
    spec = sym_eigvals(matrix, tol)
    return float(max(abs(spec.values[0]), abs(spec.values[-1])))


def linf_spectrum_error(estimate: Spectrum, truth: Spectrum) -> float:
    """Largest absolute per-position difference between two spectra."""
    if len(estimate) != len(truth):
        raise DimensionMismatchError(f"spectrum lengths differ: {len(estimate)} vs {len(truth)}")
    if len(truth) == 0:
        return 0.0
    return float(np.max(np.abs(estimate.values - truth.values)))


def wasserstein1(a: Spectrum, b: Spectrum) -> float:
    """Average absolute per-position difference, ``(1/n) * sum |a_i - b_i|``.

    Both spectra are already sorted, so this is the 1-Wasserstein distance
    between their empirical distributions.  Never exceeds the l-infinity
    error on the same pair.
    """
    if len(a) != len(b):
        raise DimensionMismatchError(f"spectrum lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise DimensionMismatchError("wasserstein1 requires nonempty spectra")
    return float(np.mean(np.abs(a.values - b.values)))


def weyl_gap(a: SymMatrix, b: SymMatrix, tol: float = DEFAULT_TOL) -> float:
    """Largest per-position eigenvalue gap between two matrices.

    Bounded above by the spectral norm of ``a - b``, which is how additive
    perturbations translate into spectrum error.
    """
    a._check_same_dim(b)
    return linf_spectrum_error(sym_eigvals(a, tol), sym_eigvals(b, tol))
