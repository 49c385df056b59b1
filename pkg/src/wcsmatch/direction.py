"""Linear assignment subproblems over the relaxed feasible set.

Each outer iteration needs  argmin <S, Y>  over the relaxed set.  Because the
set's extreme points are exactly the binary assignments with ``target_size``
ones, the minimum is attained at one of them and the problem reduces to
picking the best L row/column pairs.  Two routes are provided:

* ``exact`` solves the cardinality-constrained assignment to optimality by
  successive shortest augmenting paths with dual reweighting (min-cost flow
  specialized to dense bipartite graphs, L augmentations).
* ``fast`` solves an ordinary full assignment of all M rows, then drops the
  M - L matched pairs with the smallest scores.  Cheaper, but the kept pairs
  are not necessarily the optimal size-L assignment.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment

from .types import PartialPermutation


class DirectionMethod(str, Enum):
    EXACT = "exact"
    FAST = "fast"


def _check_score(score: np.ndarray, target_size: int) -> np.ndarray:
    score = np.asarray(score, dtype=float)
    if score.ndim != 2:
        raise ValueError(f"score must be a matrix, got shape {score.shape}")
    if not np.all(np.isfinite(score)):
        raise ValueError("score matrix has non-finite entries")
    if not 1 <= target_size <= min(score.shape):
        raise ValueError(
            f"target_size must lie in [1, {min(score.shape)}], got {target_size}"
        )
    return score


def _exact_indices(score: np.ndarray, target_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Matched (rows, cols) of the optimal size-L selection, rows ascending.

    Successive shortest path search on the residual graph.  Costs are the
    negated scores shifted to be nonnegative; row duals ``u`` and column
    duals ``v`` keep every reduced cost nonnegative and matched pairs tight,
    so each round is a plain Dijkstra over columns.  Unmatched rows keep a
    zero dual, which is what makes stopping after L rounds optimal for the
    cardinality-constrained problem rather than just for the full matching.
    Plain lists beat ndarrays here: the matrices are small and the work is
    all element access inside the Dijkstra loop.
    """
    m, n = score.shape
    cost = (score.max() - score).tolist()
    inf = float("inf")

    u = [0.0] * m
    v = [0.0] * n
    row_match = [-1] * m
    col_match = [-1] * n
    free = list(range(m))

    for _ in range(target_size):
        dist = [inf] * n
        enter_row = [-1] * n
        for i in free:
            ci = cost[i]
            ui = u[i]
            for j in range(n):
                d = ci[j] - ui - v[j]
                if d < dist[j]:
                    dist[j] = d
                    enter_row[j] = i
        finalized = [False] * n
        frontier = dist[:]  # dist with finalized columns masked out
        fin: list[int] = []

        while True:
            best = inf
            j = -1
            for jj, f in enumerate(frontier):
                if f < best:
                    best = f
                    j = jj
            if col_match[j] < 0:
                d_star = dist[j]
                break
            finalized[j] = True
            frontier[j] = inf
            fin.append(j)
            i = col_match[j]
            ci = cost[i]
            dj = dist[j]
            ui = u[i]
            for jj in range(n):
                if not finalized[jj]:
                    cand = dj + ci[jj] - ui - v[jj]
                    if cand < dist[jj]:
                        dist[jj] = cand
                        frontier[jj] = cand
                        enter_row[jj] = i

        # Reweight so future reduced costs stay nonnegative: finalized columns
        # move by their distance shortfall, their matched rows absorb the
        # opposite shift, and the row that starts the path picks up d_star.
        for jj in fin:
            delta = dist[jj] - d_star
            v[jj] += delta
            u[col_match[jj]] -= delta

        while j >= 0:
            i = enter_row[j]
            previous = row_match[i]
            row_match[i] = j
            col_match[j] = i
            j = previous
        u[i] += d_star
        free.remove(i)

    rows = [i for i in range(m) if row_match[i] >= 0]
    return np.array(rows), np.array([row_match[i] for i in rows])


def _truncated_indices(score: np.ndarray, target_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Full-assignment pairs with the M - L lowest-scoring ones dropped.

    Ties on the dropped values are broken by removing the lowest (row, col)
    first, which keeps the result deterministic.
    """
    rows, cols = linear_sum_assignment(score, maximize=True)
    values = score[rows, cols]
    order = np.lexsort((cols, rows, values))
    keep = np.sort(order[len(rows) - target_size :])
    return rows[keep], cols[keep]


def _best_indices(
    score, target_size: int, method: DirectionMethod | str
) -> tuple[np.ndarray, np.ndarray, tuple[int, int]]:
    score = _check_score(score, target_size)
    if DirectionMethod(method) is DirectionMethod.EXACT:
        rows, cols = _exact_indices(score, target_size)
    else:
        rows, cols = _truncated_indices(score, target_size)
    return rows, cols, score.shape


def exact_cardinality_assignment(score, target_size: int) -> PartialPermutation:
    """Highest-scoring selection of exactly ``target_size`` disjoint pairs."""
    rows, cols, shape = _best_indices(score, target_size, DirectionMethod.EXACT)
    return PartialPermutation.from_pairs(*shape, zip(rows.tolist(), cols.tolist()))


def truncated_assignment(score, target_size: int) -> PartialPermutation:
    """Full assignment of all rows, keeping only the best ``target_size`` pairs."""
    rows, cols, shape = _best_indices(score, target_size, DirectionMethod.FAST)
    return PartialPermutation.from_pairs(*shape, zip(rows.tolist(), cols.tolist()))


def best_assignment(
    score, target_size: int, method: DirectionMethod | str = DirectionMethod.EXACT
) -> PartialPermutation:
    """Dispatch on the configured route; maximizes <score, Y>."""
    if DirectionMethod(method) is DirectionMethod.EXACT:
        return exact_cardinality_assignment(score, target_size)
    return truncated_assignment(score, target_size)


def linear_minimizer(
    gradient, target_size: int, method: DirectionMethod | str = DirectionMethod.EXACT
) -> PartialPermutation:
    """Binary assignment minimizing <gradient, Y>: the descent-direction target."""
    return best_assignment(-np.asarray(gradient, dtype=float), target_size, method)


def _minimizer_matrix(
    gradient: np.ndarray, target_size: int, method: DirectionMethod | str
) -> np.ndarray:
    """Raw 0/1 matrix minimizing <gradient, Y>; skips dataclass wrapping."""
    rows, cols, shape = _best_indices(-gradient, target_size, method)
    out = np.zeros(shape)
    out[rows, cols] = 1.0
    return out


def discretize(x, target_size: int | None = None) -> PartialPermutation:
    """Closest binary assignment to ``x`` in inner product: argmax <X, Y>.

    Used as a safety net when the continuation loop runs out of schedule
    while the iterate is still fractional.  Binary feasible inputs are fixed
    points.
    """
    if target_size is None:
        target_size = x.target_size
    entries = x.entries if hasattr(x, "entries") else np.asarray(x, dtype=float)
    return exact_cardinality_assignment(entries, target_size)
