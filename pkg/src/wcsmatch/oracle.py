"""Exhaustive reference solutions for small matching instances.

The search space factorizes as (choice of G rows) x (choice of H columns) x
(bijection between them), giving C(M,L) * C(N,L) * L! candidates.  Walking
all of them is only viable for tiny instances, which is exactly what the
rest of the test suite needs: a ground-truth optimum nothing can beat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator

import numpy as np

from .types import PartialPermutation, ProblemInstance

ENUMERATION_CAP = 10_000_000
# Two candidate values this close count as the same optimum.
TIE_TOL = 1e-9


def count_assignments(m: int, n: int, target_size: int) -> int:
    return math.comb(m, target_size) * math.comb(n, target_size) * math.factorial(target_size)


def _check_enumerable(m: int, n: int, target_size: int, cap: int) -> int:
    if not 1 <= target_size <= m <= n:
        raise ValueError(f"need 1 <= L <= M <= N, got L={target_size}, M={m}, N={n}")
    total = count_assignments(m, n, target_size)
    if total > cap:
        raise ValueError(f"{total} candidates exceed the enumeration cap {cap}")
    return total


def _index_tuples(m: int, n: int, target_size: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    # rows are emitted sorted; the column tuple carries the bijection order.
    for rows in combinations(range(m), target_size):
        for cols in combinations(range(n), target_size):
            for image in permutations(cols):
                yield rows, image


def enumerate_partial_permutations(
    m: int, n: int, target_size: int, cap: int = ENUMERATION_CAP
) -> Iterator[PartialPermutation]:
    """Every binary assignment with ``target_size`` ones, exactly once."""
    _check_enumerable(m, n, target_size, cap)
    for rows, image in _index_tuples(m, n, target_size):
        yield PartialPermutation.from_pairs(m, n, zip(rows, image))


@dataclass(frozen=True)
class OracleResult:
    best_assignment: PartialPermutation
    best_value: float
    num_candidates: int
    num_optima: int


def brute_force_min(instance: ProblemInstance, cap: int = ENUMERATION_CAP) -> OracleResult:
    """Exact minimum of the blended objective over all binary assignments.

    Only the selected L x L blocks contribute to the structural term, so each
    candidate is scored on its submatrices instead of building a full X.
    Ties within ``TIE_TOL`` keep the earliest candidate in enumeration order.
    """
    m, n, target_size = instance.m, instance.n, instance.target_size
    total = _check_enumerable(m, n, target_size, cap)
    a_g, a_h, cost, alpha = instance.a_g, instance.a_h, instance.cost_entries, instance.alpha

    best = math.inf
    anchor = math.inf
    stored: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    near: list[float] = []

    row_cache: tuple[tuple[int, ...], np.ndarray] | None = None
    for rows, image in _index_tuples(m, n, target_size):
        if row_cache is None or row_cache[0] != rows:
            row_cache = (rows, a_g[np.ix_(rows, rows)])
        block_g = row_cache[1]
        block_h = a_h[np.ix_(image, image)]
        diff = block_g - block_h
        value = alpha * float(np.vdot(diff, diff))
        if alpha != 1.0:
            value += (1.0 - alpha) * float(cost[list(rows), list(image)].sum())

        if value < best:
            best = value
            near = [v for v in near if v <= best + TIE_TOL]
        if value <= best + TIE_TOL:
            near.append(value)
        if value < anchor - TIE_TOL:
            anchor = value
            stored = (rows, image)

    assert stored is not None
    assignment = PartialPermutation.from_pairs(m, n, zip(stored[0], stored[1]))
    return OracleResult(
        best_assignment=assignment,
        best_value=best,
        num_candidates=total,
        num_optima=len(near),
    )
