"""Graphs, assignment matrices, and the feasible sets they live in.

A matching between a graph G with M vertices and a graph H with N vertices
(M <= N) is a binary M x N matrix with row and column sums at most one.  When
exactly ``target_size`` entries are one, the matrix selects a size-L subgraph
of each graph and a vertex bijection between them.  The relaxed feasible set
replaces binarity with nonnegativity while keeping the sum constraints; its
extreme points are exactly the binary matrices, which is what lets a linear
minimization over the relaxation be solved by a combinatorial routine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Tolerance for membership in the relaxed feasible set.
FEASIBILITY_TOL = 1e-6
# Looser tolerance used to decide when a relaxed iterate is effectively binary.
BINARITY_TOL = 1e-3


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def matrix_of(x) -> np.ndarray:
    """Coerce an assignment-like object (dataclass or array) to an ndarray."""
    if hasattr(x, "entries"):
        x = x.entries
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class WeightedGraph:
    """A weighted graph stored as a dense adjacency matrix.

    Edge weights are nonnegative reals and an absent edge is encoded as
    weight zero, so sparsity lives in the zero pattern.  Self-loops are
    rejected.  Optional vertex labels are kept only as metadata (the
    benchmark generator stores plane coordinates there); the matching
    objective itself never reads them.
    """

    adjacency: np.ndarray
    labels: np.ndarray | None = None
    symmetric: bool = field(init=False, default=False)

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be a square matrix, got shape {adj.shape}")
        if adj.shape[0] == 0:
            raise ValueError("graph needs at least one vertex")
        if not np.all(np.isfinite(adj)):
            raise ValueError("adjacency has non-finite entries")
        if np.any(adj < 0):
            raise ValueError("edge weights must be nonnegative")
        if np.any(np.diagonal(adj) != 0):
            raise ValueError("self-loops are not supported: diagonal must be zero")
        object.__setattr__(self, "adjacency", _readonly(adj))
        object.__setattr__(self, "symmetric", bool(np.array_equal(adj, adj.T)))
        if self.labels is not None:
            lab = np.array(self.labels, dtype=float)
            if lab.ndim != 2 or lab.shape[0] != adj.shape[0]:
                raise ValueError(
                    f"labels must be (size, k), got {lab.shape} for {adj.shape[0]} vertices"
                )
            object.__setattr__(self, "labels", _readonly(lab))

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        """Number of undirected edges (counted once for symmetric graphs)."""
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))


@dataclass(frozen=True)
class CostMatrix:
    """Linear vertex-to-vertex dissimilarities, one row per G vertex."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        if c.ndim != 2:
            raise ValueError(f"cost matrix must be 2-d, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("cost matrix has non-finite entries")
        object.__setattr__(self, "entries", _readonly(c))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def validate_partial_permutation(x, target_size: int, tol: float = BINARITY_TOL) -> bool:
    """Check that ``x`` is a binary assignment of exactly ``target_size`` pairs.

    Entries may deviate from {0, 1} by at most ``tol``; row and column sums
    of the rounded matrix must not exceed one and must total ``target_size``.
    """
    mat = matrix_of(x)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {mat.shape}")
    if target_size < 0:
        raise ValueError("target_size must be nonnegative")
    rounded = np.rint(mat)
    if np.max(np.abs(mat - rounded), initial=0.0) > tol:
        return False
    if np.any((rounded != 0.0) & (rounded != 1.0)):
        return False
    if np.any(rounded.sum(axis=1) > 1.0) or np.any(rounded.sum(axis=0) > 1.0):
        return False
    return int(rounded.sum()) == target_size


@dataclass(frozen=True)
class PartialPermutation:
    """Binary M x N matrix with unit row/column caps and ``target_size`` ones."""

    entries: np.ndarray
    target_size: int

    def __post_init__(self):
        mat = np.array(self.entries, dtype=float)
        if mat.ndim != 2:
            raise ValueError(f"assignment must be a matrix, got shape {mat.shape}")
        if not validate_partial_permutation(mat, self.target_size, tol=0.0):
            raise ValueError(
                f"entries are not a binary assignment of exactly {self.target_size} pairs"
            )
        object.__setattr__(self, "entries", _readonly(np.rint(mat)))

    @classmethod
    def from_pairs(
        cls, m: int, n: int, pairs: Iterable[tuple[int, int]], *, target_size: int | None = None
    ) -> "PartialPermutation":
        mat = np.zeros((m, n))
        count = 0
        for i, j in pairs:
            mat[i, j] = 1.0
            count += 1
        if target_size is None:
            target_size = count
        return cls(mat, target_size)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Matched (row, column) pairs in row order."""
        rows, cols = np.nonzero(self.entries)
        return tuple(zip(rows.tolist(), cols.tolist()))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class RelaxedAssignment:
    """Point of the relaxed feasible set: X >= 0, row/col sums <= 1, sum = L."""

    entries: np.ndarray
    target_size: int

    def __post_init__(self):
        mat = np.array(self.entries, dtype=float)
        if mat.ndim != 2:
            raise ValueError(f"assignment must be a matrix, got shape {mat.shape}")
        tol = FEASIBILITY_TOL
        if np.any(mat < -tol):
            raise ValueError("relaxed assignment has negative entries")
        if np.any(mat.sum(axis=1) > 1.0 + tol) or np.any(mat.sum(axis=0) > 1.0 + tol):
            raise ValueError("row or column sums exceed one")
        if abs(mat.sum() - self.target_size) > tol * max(1, mat.size):
            raise ValueError(
                f"entries sum to {mat.sum()!r}, expected target size {self.target_size}"
            )
        object.__setattr__(self, "entries", _readonly(mat))

    @classmethod
    def uniform(cls, m: int, n: int, target_size: int) -> "RelaxedAssignment":
        """The barycentric start point: every entry equal to L / (M * N)."""
        return cls(np.full((m, n), target_size / (m * n)), target_size)

    def is_binary(self, tol: float = BINARITY_TOL) -> bool:
        return validate_partial_permutation(self.entries, self.target_size, tol=tol)

    def rounded(self) -> PartialPermutation:
        return PartialPermutation(np.rint(self.entries), self.target_size)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


def selection_mask(x) -> np.ndarray:
    """Matrix that gates which G entries are compared: X 1 X^T = outer(r, r).

    ``r`` is the vector of row sums; for a binary assignment the mask is one
    exactly on the rows matched to some column, i.e. on the selected subgraph.
    """
    mat = matrix_of(x)
    r = mat.sum(axis=1)
    return np.outer(r, r)


@dataclass(frozen=True)
class ProblemInstance:
    """One matching problem: two graphs, a linear cost, a size, and a blend.

    ``alpha`` in [0, 1] weighs the structural term against the linear cost
    term; ``alpha = 1`` is pure structure.  The smaller graph must come
    first (M <= N) and the requested size must satisfy 1 <= L <= M.
    """

    graph_g: WeightedGraph
    graph_h: WeightedGraph
    target_size: int
    cost: CostMatrix | None = None
    alpha: float = 1.0
    ground_truth: PartialPermutation | None = None

    def __post_init__(self):
        m, n = self.graph_g.size, self.graph_h.size
        if m > n:
            raise ValueError(
                f"graph_g has {m} vertices > graph_h's {n}; orient inputs smaller-first"
            )
        if not 1 <= self.target_size <= m:
            raise ValueError(f"target_size must satisfy 1 <= L <= {m}, got {self.target_size}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.cost is None:
            if self.alpha != 1.0:
                raise ValueError("alpha < 1 requires a cost matrix")
            object.__setattr__(self, "cost", CostMatrix(np.zeros((m, n))))
        elif self.cost.shape != (m, n):
            raise ValueError(f"cost matrix shape {self.cost.shape} does not match ({m}, {n})")
        if self.ground_truth is not None:
            gt = self.ground_truth
            if (gt.m, gt.n) != (m, n) or gt.target_size != self.target_size:
                raise ValueError("ground truth does not match instance dimensions")

    @property
    def m(self) -> int:
        return self.graph_g.size

    @property
    def n(self) -> int:
        return self.graph_h.size

    @property
    def a_g(self) -> np.ndarray:
        return self.graph_g.adjacency

    @property
    def a_h(self) -> np.ndarray:
        return self.graph_h.adjacency

    @property
    def cost_entries(self) -> np.ndarray:
        return self.cost.entries
