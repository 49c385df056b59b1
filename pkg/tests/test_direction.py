import itertools

import numpy as np
import pytest

from wcsmatch.direction import (
    DirectionMethod,
    best_assignment,
    discretize,
    exact_cardinality_assignment,
    linear_minimizer,
    truncated_assignment,
)
from wcsmatch.types import PartialPermutation, RelaxedAssignment


def enumerated_best(score: np.ndarray, target_size: int) -> float:
    m, n = score.shape
    best = -np.inf
    for rows in itertools.combinations(range(m), target_size):
        for image in itertools.permutations(range(n), target_size):
            best = max(best, sum(score[i, j] for i, j in zip(rows, image)))
    return best


def test_exact_matches_enumeration_on_random_scores():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(m, 7))
        l = int(rng.integers(1, m + 1))
        score = rng.normal(size=(m, n)) * 10
        result = exact_cardinality_assignment(score, l)
        value = float(np.vdot(result.entries, score))
        assert value == pytest.approx(enumerated_best(score, l), abs=1e-9)
        assert result.target_size == l


def test_exact_handles_negative_and_constant_scores():
    score = -np.ones((3, 4))
    result = exact_cardinality_assignment(score, 2)
    assert float(np.vdot(result.entries, score)) == pytest.approx(-2.0)
    tied = np.zeros((3, 3))
    result = exact_cardinality_assignment(tied, 3)
    assert result.entries.sum() == 3


def test_truncated_never_beats_exact():
    rng = np.random.default_rng(1)
    for _ in range(50):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(m, 8))
        l = int(rng.integers(1, m + 1))
        score = rng.normal(size=(m, n))
        exact = float(np.vdot(exact_cardinality_assignment(score, l).entries, score))
        fast = float(np.vdot(truncated_assignment(score, l).entries, score))
        assert fast <= exact + 1e-9


def test_truncated_is_suboptimal_on_a_known_instance():
    # The full assignment must take the -5 entry; dropping one pair cannot
    # recover the best 1-pair selection, which the exact route finds.
    score = np.array([[10.0, 9.0], [9.0, -5.0]])
    exact = exact_cardinality_assignment(score, 1)
    fast = truncated_assignment(score, 1)
    assert float(np.vdot(exact.entries, score)) == pytest.approx(10.0)
    assert float(np.vdot(fast.entries, score)) == pytest.approx(9.0)


def test_truncated_full_size_equals_exact():
    rng = np.random.default_rng(2)
    for _ in range(20):
        score = rng.normal(size=(4, 4))
        exact = exact_cardinality_assignment(score, 4)
        fast = truncated_assignment(score, 4)
        assert float(np.vdot(exact.entries, score)) == pytest.approx(
            float(np.vdot(fast.entries, score)), abs=1e-9
        )


def test_best_assignment_dispatch():
    rng = np.random.default_rng(3)
    score = rng.normal(size=(3, 5))
    via_enum = best_assignment(score, 2, DirectionMethod.EXACT)
    via_str = best_assignment(score, 2, "exact")
    assert np.array_equal(via_enum.entries, via_str.entries)
    fast = best_assignment(score, 2, "fast")
    assert fast.target_size == 2


def test_linear_minimizer_minimizes():
    rng = np.random.default_rng(4)
    gradient = rng.normal(size=(3, 4))
    result = linear_minimizer(gradient, 2)
    value = float(np.vdot(result.entries, gradient))
    assert value == pytest.approx(-enumerated_best(-gradient, 2), abs=1e-9)


def test_score_validation():
    with pytest.raises(ValueError):
        exact_cardinality_assignment(np.ones(3), 1)
    with pytest.raises(ValueError):
        exact_cardinality_assignment(np.full((2, 2), np.inf), 1)
    with pytest.raises(ValueError):
        exact_cardinality_assignment(np.ones((2, 3)), 3)
    with pytest.raises(ValueError):
        exact_cardinality_assignment(np.ones((2, 3)), 0)


def test_discretize_recovers_binary_points():
    p = PartialPermutation.from_pairs(3, 4, [(0, 1), (2, 3)])
    r = RelaxedAssignment(p.entries, 2)
    assert np.array_equal(discretize(r).entries, p.entries)


def test_discretize_picks_dominant_entries():
    x = np.array(
        [
            [0.7, 0.1, 0.0, 0.0],
            [0.1, 0.6, 0.1, 0.0],
            [0.0, 0.1, 0.2, 0.1],
        ]
    )
    r = RelaxedAssignment(x, 2)
    result = discretize(r)
    assert result.pairs() == ((0, 0), (1, 1))


def test_discretize_accepts_plain_arrays_with_explicit_size():
    x = np.array([[0.9, 0.0], [0.0, 0.4]])
    result = discretize(x, target_size=1)
    assert result.pairs() == ((0, 0),)
