"""Test-matrix families and graph/matrix file loaders.

Generators that involve randomness take a ``numpy.random.Generator`` so the
caller owns seeding.  Graph families are returned as sparse stores, dense
kernels as :class:`SymMatrix`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SymMatrix
from .store import SparseSymStore

TENSOR_DIM_CAP = 4096


class EdgeListParseError(ValueError):
    """A line of an edge-list file could not be parsed."""


class MatrixMarketFormatError(ValueError):
    """A MatrixMarket file violates the supported coordinate format."""


@dataclass(frozen=True)
class PointCloud:
    """Points in the unit square, one row per point."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError(f"expected an (n, 2) array of points, got shape {pts.shape}")
        if np.any(pts < 0) or np.any(pts > 1) or not np.all(np.isfinite(pts)):
            raise ValueError("points must lie inside the unit square")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def block_matrix(n: int, k: int) -> SymMatrix:
    """All-ones block of size ``k`` in the top-left corner, zero elsewhere.

    Rank one: the spectrum is ``k`` once and zero everywhere else.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    dense = np.zeros((n, n))
    dense[:k, :k] = 1.0
    return SymMatrix(dense)


def identity_matrix(n: int) -> SymMatrix:
    return SymMatrix(np.eye(n))


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> SparseSymStore:
    """Adjacency matrix of G(n, p): zero diagonal, each edge an independent coin."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    upper_i, upper_j = np.triu_indices(n, k=1)
    keep = rng.random(upper_i.size) < p
    entries = [(int(i), int(j), 1.0) for i, j in zip(upper_i[keep], upper_j[keep])]
    return SparseSymStore.build(n, entries)


def power_law_graph(n: int, exponent: float, rng: np.random.Generator) -> SparseSymStore:
    """Simple graph with power-law degrees via stub matching.

    Target degrees are Zipf(``exponent``) draws capped at ``n - 1``; stubs
    are shuffled and paired, then self-loops and repeated pairs dropped, so
    realized degrees can fall below their targets.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not exponent > 1:
        raise ValueError(f"exponent must exceed 1, got {exponent}")
    degrees = np.minimum(rng.zipf(exponent, size=n), n - 1)
    stubs = np.repeat(np.arange(n), degrees)
    if stubs.size % 2 == 1:
        stubs = stubs[:-1]
    stubs = rng.permutation(stubs)
    left, right = stubs[0::2], stubs[1::2]
    edges = {
        (int(min(u, v)), int(max(u, v)))
        for u, v in zip(left, right)
        if u != v
    }
    return SparseSymStore.build(n, [(i, j, 1.0) for i, j in sorted(edges)])


def synthetic_point_cloud(n: int, rng: np.random.Generator) -> PointCloud:
    """Noisy closed curve inside the unit square.

    Serves as a stand-in for contours extracted from images: points follow
    a lobed loop around the square's center with radial jitter.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    radius = 0.33 * (1.0 + 0.22 * np.sin(2.0 * angles) + 0.08 * rng.standard_normal(n))
    xs = 0.5 + radius * np.cos(angles)
    ys = 0.5 + radius * np.sin(angles)
    return PointCloud(np.clip(np.column_stack([xs, ys]), 0.0, 1.0))


def tanh_similarity(cloud: PointCloud) -> SymMatrix:
    """Similarity kernel ``tanh(<x, y> / 2)`` over a point cloud."""
    gram = cloud.points @ cloud.points.T
    return SymMatrix(np.tanh(gram / 2.0))


def thin_plate_spline(cloud: PointCloud) -> SymMatrix:
    """Kernel ``r**2 * log(r**2)`` on squared distances, zero on the diagonal.

    The ``r -> 0`` limit of the kernel is zero, so coincident points are
    well defined.
    """
    diff = cloud.points[:, None, :] - cloud.points[None, :, :]
    sq_dist = np.einsum("ijk,ijk->ij", diff, diff)
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(sq_dist > 0.0, sq_dist * np.log(sq_dist), 0.0)
    return SymMatrix(kernel)


def tridiagonal_ones(n: int) -> SparseSymStore:
    """Zero diagonal, ones on the first off-diagonals.

    Eigenvalues are ``2 * cos(k * pi / (n + 1))`` for ``k = 1..n``.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return SparseSymStore.build(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def tensor_hard_instance(inv_eps_sq: int, block: int, rng: np.random.Generator) -> SymMatrix:
    """Random sign matrix blown up by an all-ones block.

    The Kronecker product of a symmetric random +-1 matrix of side
    ``inv_eps_sq`` with an all-ones block of side ``block``.  Its nonzero
    eigenvalues are the sign matrix's eigenvalues scaled by ``block``, a
    spectrum that uniform submatrix sampling needs a large sample to pin
    down.  The resulting dimension is capped to stay desk sized.
    """
    if inv_eps_sq < 1 or block < 1:
        raise ValueError("inv_eps_sq and block must be positive")
    n = inv_eps_sq * block
    if n > TENSOR_DIM_CAP:
        raise ValueError(f"requested dimension {n} exceeds cap {TENSOR_DIM_CAP}")
    signs = rng.integers(0, 2, size=(inv_eps_sq, inv_eps_sq)) * 2.0 - 1.0
    signs = np.triu(signs) + np.triu(signs, 1).T
    return SymMatrix(np.kron(signs, np.ones((block, block))))


def load_edge_list(path: str | Path) -> SparseSymStore:
    """Read an undirected graph from a whitespace edge list.

    Lines starting with ``#`` are comments.  Node ids are arbitrary
    integers, compacted to ``0..n-1`` in order of first appearance.
    Self-loops are dropped; duplicate and reversed edges collapse to one.
    """
    path = Path(path)
    ids: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    with path.open() as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListParseError(f"{path}:{lineno}: expected two node ids, got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise EdgeListParseError(f"{path}:{lineno}: node ids must be integers") from exc
            iu = ids.setdefault(u, len(ids))
            iv = ids.setdefault(v, len(ids))
            if iu == iv:
                continue
            edges.add((min(iu, iv), max(iu, iv)))
    return SparseSymStore.build(len(ids), [(i, j, 1.0) for i, j in sorted(edges)])


def load_matrix_market(path: str | Path) -> SparseSymStore:
    """Read a real coordinate MatrixMarket file into a store.

    Supports the ``symmetric`` and ``general`` qualifiers; a general file
    whose mirrored entries disagree fails the store's construction check.
    Indices are converted from 1-based to 0-based.
    """
    path = Path(path)
    with path.open() as handle:
        lines = handle.readlines()
    if not lines:
        raise MatrixMarketFormatError(f"{path}: empty file")
    tokens = lines[0].strip().split()
    if len(tokens) != 5 or tokens[0] != "%%MatrixMarket" or tokens[1].lower() != "matrix":
        raise MatrixMarketFormatError(f"{path}: missing MatrixMarket header")
    layout, value_field, symmetry = (t.lower() for t in tokens[2:5])
    if layout != "coordinate":
        raise MatrixMarketFormatError(f"{path}: only coordinate layout is supported, got {layout!r}")
    if value_field not in ("real", "integer"):
        raise MatrixMarketFormatError(f"{path}: unsupported value field {value_field!r}")
    if symmetry not in ("symmetric", "general"):
        raise MatrixMarketFormatError(f"{path}: unsupported symmetry {symmetry!r}")

    cursor = 1
    while cursor < len(lines) and (not lines[cursor].strip() or lines[cursor].lstrip().startswith("%")):
        cursor += 1
    if cursor == len(lines):
        raise MatrixMarketFormatError(f"{path}: missing size line")
    size_parts = lines[cursor].split()
    if len(size_parts) != 3:
        raise MatrixMarketFormatError(f"{path}:{cursor + 1}: size line must be 'rows cols nnz'")
    try:
        rows, cols, declared = (int(p) for p in size_parts)
    except ValueError as exc:
        raise MatrixMarketFormatError(f"{path}:{cursor + 1}: size line must be integers") from exc
    if rows != cols:
        raise MatrixMarketFormatError(f"{path}: matrix must be square, got {rows}x{cols}")

    entries: list[tuple[int, int, float]] = []
    for lineno in range(cursor + 1, len(lines)):
        text = lines[lineno].strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise MatrixMarketFormatError(f"{path}:{lineno + 1}: expected 'i j value', got {text!r}")
        try:
            i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise MatrixMarketFormatError(f"{path}:{lineno + 1}: malformed entry {text!r}") from exc
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketFormatError(f"{path}:{lineno + 1}: index ({i}, {j}) out of range")
        entries.append((i - 1, j - 1, value))
    if len(entries) != declared:
        raise MatrixMarketFormatError(
            f"{path}: header declares {declared} entries but {len(entries)} were found"
        )
    return SparseSymStore.build(rows, entries)


def save_matrix_market(store: SparseSymStore, path: str | Path) -> None:
    """Write a store as a symmetric coordinate MatrixMarket file."""
    path = Path(path)
    stored = [(j, i, v) for i, j, v in store.entries_upper()]
    with path.open("w") as handle:
        handle.write("%%MatrixMarket matrix coordinate real symmetric\n")
        handle.write(f"{store.n} {store.n} {len(stored)}\n")
        for i, j, v in stored:
            handle.write(f"{i + 1} {j + 1} {v:.17g}\n")
