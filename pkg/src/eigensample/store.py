"""Sparse symmetric storage with aggregate queries and weighted row sampling.

Besides the nonzero entries, the store maintains per-row nonzero counts and
squared row norms together with cumulative (Fenwick) aggregates over rows.
A row can therefore be drawn with probability proportional to its sparsity
or its squared norm in O(log n), and a single-entry update keeps every
aggregate consistent in O(log n) plus the edit of the row's sorted list.

Concurrent readers are safe; ``update_entry`` requires exclusive access.
"""

from __future__ import annotations

import bisect
from typing import Iterable, Iterator

import numpy as np

from .core import DimensionMismatchError, SymMatrix

MODES = ("by_nnz", "by_sqnorm")


class StoreConstructionError(ValueError):
    """Invalid entry list: index out of range, duplicate key, or conflicting mirror."""


class NoMassError(ValueError):
    """A row was requested from a store with zero total sampling weight."""


class _Fenwick:
    """Prefix sums over row weights with O(log n) point update and search."""

    __slots__ = ("_n", "_tree")

    def __init__(self, n: int):
        self._n = n
        self._tree = [0.0] * (n + 1)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "_Fenwick":
        vals = list(values)
        fen = cls(len(vals))
        tree = fen._tree
        # linear-time build: push each partial sum to the enclosing node
        for i, v in enumerate(vals, start=1):
            tree[i] += float(v)
            parent = i + (i & -i)
            if parent <= fen._n:
                tree[parent] += tree[i]
        return fen

    def add(self, index: int, delta: float) -> None:
        i = index + 1
        while i <= self._n:
            self._tree[i] += delta
            i += i & -i

    def prefix(self, count: int) -> float:
        total = 0.0
        i = count
        while i > 0:
            total += self._tree[i]
            i -= i & -i
        return total

    @property
    def total(self) -> float:
        return self.prefix(self._n)

    def find(self, u: float) -> int:
        """Smallest row index whose cumulative weight exceeds ``u``."""
        pos = 0
        rem = u
        bit = 1 << max(self._n.bit_length(), 1)
        while bit:
            nxt = pos + bit
            if nxt <= self._n and self._tree[nxt] <= rem:
                rem -= self._tree[nxt]
                pos = nxt
            bit >>= 1
        return pos


class SparseSymStore:
    """Symmetric sparse matrix held as per-row sorted (column, value) lists.

    Off-diagonal entries are materialized in both mirror rows, so
    ``total_nnz`` counts them twice and ``frob_sq`` is the true squared
    Frobenius norm.  ``n == 0`` is legal and describes an empty matrix.
    """

    def __init__(self, n: int):
        if n < 0:
            raise StoreConstructionError(f"dimension must be nonnegative, got {n}")
        self.n = n
        self._cols: list[list[int]] = [[] for _ in range(n)]
        self._vals: list[list[float]] = [[] for _ in range(n)]
        self._row_nnz = np.zeros(n, dtype=np.int64)
        self._row_sqnorm = np.zeros(n, dtype=np.float64)
        self.total_nnz = 0
        self.frob_sq = 0.0
        self._nnz_tree = _Fenwick(n)
        self._sqnorm_tree = _Fenwick(n)

    @property
    def row_nnz(self) -> np.ndarray:
        """Per-row nonzero counts.  Treat as read-only."""
        return self._row_nnz

    @property
    def row_sqnorm(self) -> np.ndarray:
        """Per-row squared Euclidean norms.  Treat as read-only."""
        return self._row_sqnorm

    @classmethod
    def build(cls, n: int, entries: Iterable[tuple[int, int, float]]) -> "SparseSymStore":
        """Construct a store from ``(i, j, value)`` triples.

        Either or both halves of an off-diagonal pair may be given; mirrored
        duplicates must agree exactly.  Repeating the same ordered key, or
        giving conflicting mirror values, is a construction error.  Zero
        values are dropped.
        """
        ordered: dict[tuple[int, int], float] = {}
        for i, j, v in entries:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise StoreConstructionError(f"index ({i}, {j}) out of range for dimension {n}")
            if (i, j) in ordered:
                raise StoreConstructionError(f"duplicate entry ({i}, {j})")
            v = float(v)
            if not np.isfinite(v):
                raise StoreConstructionError(f"entry ({i}, {j}) is not finite")
            ordered[(i, j)] = v

        canonical: dict[tuple[int, int], float] = {}
        for (i, j), v in ordered.items():
            key = (i, j) if i <= j else (j, i)
            if key in canonical:
                if canonical[key] != v:
                    raise StoreConstructionError(f"conflicting values for mirrored entry {key}")
            else:
                canonical[key] = v

        store = cls(n)
        per_cols: list[list[int]] = store._cols
        per_vals: list[list[float]] = store._vals
        for (i, j), v in canonical.items():
            if v == 0.0:
                continue
            per_cols[i].append(j)
            per_vals[i].append(v)
            if i != j:
                per_cols[j].append(i)
                per_vals[j].append(v)
        for i in range(n):
            if len(per_cols[i]) > 1:
                order = sorted(range(len(per_cols[i])), key=per_cols[i].__getitem__)
                per_cols[i] = [per_cols[i][k] for k in order]
                per_vals[i] = [per_vals[i][k] for k in order]
        store._cols = per_cols
        store._vals = per_vals
        store._row_nnz = np.array([len(c) for c in per_cols], dtype=np.int64)
        store._row_sqnorm = np.array(
            [float(np.sum(np.square(v))) if v else 0.0 for v in per_vals], dtype=np.float64
        )
        store.total_nnz = int(store._row_nnz.sum())
        store.frob_sq = float(store._row_sqnorm.sum())
        store._nnz_tree = _Fenwick.from_values(store._row_nnz.tolist())
        store._sqnorm_tree = _Fenwick.from_values(store._row_sqnorm.tolist())
        return store

    @classmethod
    def from_dense(cls, matrix: SymMatrix) -> "SparseSymStore":
        i_idx, j_idx = np.nonzero(np.triu(matrix.entries))
        vals = matrix.entries[i_idx, j_idx]
        return cls.build(matrix.n, zip(i_idx.tolist(), j_idx.tolist(), vals.tolist()))

    def to_dense(self) -> SymMatrix:
        if self.n == 0:
            raise DimensionMismatchError("cannot densify an empty store")
        dense = np.zeros((self.n, self.n))
        for i in range(self.n):
            dense[i, self._cols[i]] = self._vals[i]
        return SymMatrix(dense)

    def entries_upper(self) -> Iterator[tuple[int, int, float]]:
        """Stored entries with ``i <= j``, one per unordered pair."""
        for i in range(self.n):
            for j, v in zip(self._cols[i], self._vals[i]):
                if j >= i:
                    yield i, j, v

    def get(self, i: int, j: int) -> float:
        self._check_index(i, j)
        cols = self._cols[i]
        k = bisect.bisect_left(cols, j)
        if k < len(cols) and cols[k] == j:
            return self._vals[i][k]
        return 0.0

    def row_entries(self, i: int) -> tuple[list[int], list[float]]:
        """Sorted column ids and values of row ``i``.  Treat as read-only."""
        return self._cols[i], self._vals[i]

    def _check_index(self, i: int, j: int) -> None:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"index ({i}, {j}) out of range for dimension {self.n}")

    def inclusion_probs(self, s: float, mode: str) -> np.ndarray:
        """Per-row inclusion probabilities for an expected sample budget ``s``.

        ``by_nnz`` uses ``min(1, s * row_nnz / total_nnz)`` and gives empty
        rows probability zero.  ``by_sqnorm`` uses
        ``min(1, s * row_sqnorm / frob_sq + 1/n**2)``; the additive floor
        keeps every row reachable regardless of its norm.
        """
        if not s > 0:
            raise ValueError(f"s must be positive, got {s}")
        if mode == "by_nnz":
            if self.total_nnz == 0:
                return np.zeros(self.n)
            return np.minimum(1.0, s * self._row_nnz / self.total_nnz)
        if mode == "by_sqnorm":
            if self.frob_sq == 0.0:
                base = np.zeros(self.n)
            else:
                base = s * self._row_sqnorm / self.frob_sq
            return np.minimum(1.0, base + 1.0 / self.n**2) if self.n else np.zeros(0)
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")

    def sample_row(self, mode: str, rng: np.random.Generator) -> int:
        """Draw one row index with probability proportional to its weight."""
        if mode == "by_nnz":
            tree = self._nnz_tree
        elif mode == "by_sqnorm":
            tree = self._sqnorm_tree
        else:
            raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
        total = tree.total
        if total <= 0.0:
            raise NoMassError(f"store has no {mode} mass to sample from")
        return tree.find(rng.random() * total)

    def update_entry(self, i: int, j: int, value: float) -> None:
        """Set entry ``(i, j)`` (and its mirror) to ``value``; zero removes."""
        self._check_index(i, j)
        value = float(value)
        if not np.isfinite(value):
            raise ValueError(f"entry ({i}, {j}) must be finite")
        self._set_directed(i, j, value)
        if i != j:
            self._set_directed(j, i, value)

    def _set_directed(self, i: int, j: int, value: float) -> None:
        cols, vals = self._cols[i], self._vals[i]
        k = bisect.bisect_left(cols, j)
        present = k < len(cols) and cols[k] == j
        old = vals[k] if present else 0.0
        if present and value == 0.0:
            del cols[k]
            del vals[k]
            self._row_nnz[i] -= 1
            self.total_nnz -= 1
            self._nnz_tree.add(i, -1.0)
        elif not present and value != 0.0:
            cols.insert(k, j)
            vals.insert(k, value)
            self._row_nnz[i] += 1
            self.total_nnz += 1
            self._nnz_tree.add(i, 1.0)
        elif present:
            vals[k] = value
        else:
            return
        delta_sq = value * value - old * old
        if delta_sq != 0.0:
            self._row_sqnorm[i] += delta_sq
            self.frob_sq += delta_sq
            self._sqnorm_tree.add(i, delta_sq)
