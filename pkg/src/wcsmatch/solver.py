"""Continuation matching loop with a conditional-gradient inner solver.

The outer loop slides ``zeta`` from 1 down to -1.  At each value the blended
functional (1 - |zeta|) F + zeta ||X||^2 is minimized over the relaxed
polytope, warm-starting from the previous minimizer.  Early on the extra
norm term makes the problem convex and smears the iterate toward the
uniform matrix; past zero it turns concave and squeezes the iterate into a
vertex, i.e. a binary assignment, at which point the loop stops.

The inner solver is plain conditional gradient: a linear assignment gives
the best feasible target for the current gradient, then a line search moves
along the connecting segment.  Feasibility is preserved automatically since
the polytope is convex.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .direction import DirectionMethod, _minimizer_matrix, discretize
from .objective import (
    RelaxationKind,
    SEGMENT_DEGREE,
    graduated_gradient,
    graduated_segment,
    graduated_value,
    reference_objective,
    reference_value,
)
from .types import (
    BINARITY_TOL,
    PartialPermutation,
    ProblemInstance,
    RelaxedAssignment,
    matrix_of,
    validate_partial_permutation,
)

# Slack for deciding that the zeta schedule has passed -1; purely to absorb
# accumulated floating error in 1 - k * step.
_SCHEDULE_EPS = 1e-9


class LineSearch(str, Enum):
    AUTO = "auto"
    EXACT = "exact"
    BACKTRACKING = "backtracking"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the continuation loop and the inner conditional gradient.

    ``alpha`` overrides the instance blend when set; ``None`` keeps the
    instance's own value.  ``linesearch`` AUTO picks the exact polynomial
    search where the objective restricted to a segment is quartic (h1, piw)
    and Armijo backtracking otherwise.  ``seed`` is recorded for
    reproducibility bookkeeping; the loop itself is deterministic.
    """

    relaxation: RelaxationKind = RelaxationKind.H1
    direction: DirectionMethod = DirectionMethod.EXACT
    alpha: float | None = None
    zeta_step: float = 0.01
    fw_max_iters: int = 100
    fw_gap_tol: float = 1e-4
    linesearch: LineSearch = LineSearch.AUTO
    ls_shrink: float = 0.5
    ls_armijo: float = 1e-4
    ls_max_halvings: int = 30
    binarity_tol: float = BINARITY_TOL
    blend_structure: bool = True
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "relaxation", RelaxationKind(self.relaxation))
        object.__setattr__(self, "direction", DirectionMethod(self.direction))
        object.__setattr__(self, "linesearch", LineSearch(self.linesearch))
        if not 0.0 < self.zeta_step <= 2.0:
            raise ValueError(f"zeta_step must lie in (0, 2], got {self.zeta_step}")
        if self.fw_max_iters < 1:
            raise ValueError("fw_max_iters must be at least 1")
        if self.fw_gap_tol <= 0 or self.binarity_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.ls_shrink < 1.0:
            raise ValueError(f"ls_shrink must lie in (0, 1), got {self.ls_shrink}")
        if not 0.0 < self.ls_armijo < 1.0:
            raise ValueError(f"ls_armijo must lie in (0, 1), got {self.ls_armijo}")
        if self.ls_max_halvings < 1:
            raise ValueError("ls_max_halvings must be at least 1")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class TraceRecord:
    """One continuation step: where zeta was and what the inner solve did."""

    zeta: float
    j_value: float
    fw_iters: int
    gap: float
    binarity: float


@dataclass(frozen=True)
class FwOutcome:
    x: RelaxedAssignment
    j_value: float
    iterations: int
    gap: float
    j_history: tuple[float, ...]


@dataclass(frozen=True)
class MatchResult:
    assignment: PartialPermutation
    objective_h0: float
    objective_f: float
    trace: tuple[TraceRecord, ...]
    discretized_by_fallback: bool
    wall_time: float


def _real_cubic_roots(a: float, b: float, c: float, d: float) -> list[float]:
    """Real roots of a t^3 + b t^2 + c t + d, degrading gracefully in degree."""
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0.0:
        return []
    a, b, c, d = a / scale, b / scale, c / scale, d / scale
    if abs(a) < 1e-12:
        if abs(b) < 1e-12:
            return [] if abs(c) < 1e-12 else [-d / c]
        disc = c * c - 4.0 * b * d
        if disc < 0.0:
            return []
        root = float(np.sqrt(disc))
        return [(-c - root) / (2.0 * b), (-c + root) / (2.0 * b)]
    p = b / a
    q = c / a
    r = d / a
    # Depressed form s^3 + ps*s + qs via t = s - p/3.
    ps = q - p * p / 3.0
    qs = 2.0 * p**3 / 27.0 - p * q / 3.0 + r
    shift = -p / 3.0
    disc = (qs / 2.0) ** 2 + (ps / 3.0) ** 3
    if disc > 1e-14:
        root = float(np.sqrt(disc))
        s = float(np.cbrt(-qs / 2.0 + root) + np.cbrt(-qs / 2.0 - root))
        return [s + shift]
    if disc < -1e-14:
        size = 2.0 * float(np.sqrt(-ps / 3.0))
        theta = float(np.arccos(np.clip(3.0 * qs / (ps * size), -1.0, 1.0)))
        third = 2.0 * np.pi / 3.0
        return [size * float(np.cos(theta / 3.0 - k * third)) + shift for k in range(3)]
    if abs(ps) < 1e-14:
        return [shift]
    return [3.0 * qs / ps + shift, -1.5 * qs / ps + shift]


def _quartic_step(coeffs: np.ndarray) -> tuple[float, float]:
    """Minimize an explicit quartic (ascending coefficients) over [0, 1]."""
    c0, c1, c2, c3, c4 = (float(v) for v in coeffs)

    def val(t: float) -> float:
        return c0 + t * (c1 + t * (c2 + t * (c3 + t * c4)))

    best_t, best_v = 0.0, c0
    end = val(1.0)
    if end < best_v:
        best_t, best_v = 1.0, end
    for t in _real_cubic_roots(4.0 * c4, 3.0 * c3, 2.0 * c2, c1):
        if 0.0 < t < 1.0:
            v = val(t)
            if v < best_v:
                best_t, best_v = t, v
    return best_t, best_v


def _backtracking_step(
    segment_value, value0: float, slope: float, config: SolverConfig
) -> tuple[float, float]:
    """Largest step in {shrink^k} satisfying the sufficient-decrease test."""
    lam = 1.0
    for _ in range(config.ls_max_halvings + 1):
        candidate = float(segment_value(lam))
        if candidate <= value0 + config.ls_armijo * lam * slope:
            return lam, candidate
        lam *= config.ls_shrink
    return 0.0, value0


def fw_minimize(
    x0,
    instance: ProblemInstance,
    kind: RelaxationKind | str,
    zeta: float,
    config: SolverConfig | None = None,
) -> FwOutcome:
    """Conditional-gradient descent of the continuation functional at fixed zeta.

    Stops when the duality gap <-grad, Y - X> falls below
    ``fw_gap_tol * (1 + |J|)`` or after ``fw_max_iters`` updates.  The
    returned value never exceeds the starting one.
    """
    config = config or SolverConfig()
    kind = RelaxationKind(kind)
    ls = config.linesearch
    if ls is LineSearch.AUTO:
        ls = LineSearch.EXACT if SEGMENT_DEGREE[kind] <= 4 else LineSearch.BACKTRACKING
    if ls is LineSearch.EXACT and SEGMENT_DEGREE[kind] > 4:
        raise ValueError("exact line search supports quartic restrictions only (h1, piw)")

    target_size = instance.target_size
    x = matrix_of(x0)
    value = graduated_value(x, instance, kind, zeta)
    history = [value]
    gap = 0.0
    iterations = 0

    for _ in range(config.fw_max_iters):
        grad = graduated_gradient(
            x, instance, kind, zeta, blend_structure=config.blend_structure
        )
        y = _minimizer_matrix(grad, target_size, config.direction)
        d = y - x
        gap = float(-np.vdot(grad, d))
        if gap <= config.fw_gap_tol * (1.0 + abs(value)):
            break

        if ls is LineSearch.EXACT:
            lam, new_value = _quartic_step(graduated_segment(x, d, instance, kind, zeta))
        else:

            def segment_value(t, x=x, d=d):
                return graduated_value(x + t * d, instance, kind, zeta)

            slope = float(np.vdot(grad, d))
            lam, new_value = _backtracking_step(segment_value, value, slope, config)
        if lam <= 0.0 or new_value > value:
            break
        x = x + lam * d
        value = new_value
        history.append(value)
        iterations += 1

    return FwOutcome(
        x=RelaxedAssignment(x, target_size),
        j_value=value,
        iterations=iterations,
        gap=gap,
        j_history=tuple(history),
    )


def _effective_instance(instance: ProblemInstance, config: SolverConfig) -> ProblemInstance:
    if config.alpha is None or config.alpha == instance.alpha:
        return instance
    return replace(instance, alpha=config.alpha)


def match(instance: ProblemInstance, config: SolverConfig | None = None) -> MatchResult:
    """Run the full continuation schedule and return a binary assignment.

    The schedule stops as soon as the iterate is binary within
    ``binarity_tol``; if it never becomes binary the closest assignment (by
    inner product) is taken and flagged via ``discretized_by_fallback``.
    """
    started = time.perf_counter()
    config = config or SolverConfig()
    kind = config.relaxation
    inst = _effective_instance(instance, config)
    if kind is RelaxationKind.PIW and inst.target_size != inst.m:
        raise ValueError("piw requires target_size == m (every G vertex matched)")

    m, n, target_size = inst.m, inst.n, inst.target_size
    x = np.full((m, n), target_size / (m * n))
    trace: list[TraceRecord] = []
    binary = validate_partial_permutation(x, target_size, tol=config.binarity_tol)

    step_index = 0
    while not binary:
        zeta = 1.0 - step_index * config.zeta_step
        if zeta < -1.0 - _SCHEDULE_EPS:
            break
        zeta = min(1.0, max(-1.0, zeta))
        outcome = fw_minimize(x, inst, kind, zeta, config)
        x = outcome.x.entries
        binarity = float(np.max(np.abs(x - np.rint(x))))
        trace.append(
            TraceRecord(
                zeta=zeta,
                j_value=outcome.j_value,
                fw_iters=outcome.iterations,
                gap=outcome.gap,
                binarity=binarity,
            )
        )
        binary = validate_partial_permutation(x, target_size, tol=config.binarity_tol)
        step_index += 1

    if binary:
        assignment = PartialPermutation(np.rint(x), target_size)
        fallback = False
    else:
        assignment = discretize(RelaxedAssignment(x, target_size))
        fallback = True

    return MatchResult(
        assignment=assignment,
        objective_h0=reference_value(assignment.entries, inst.a_g, inst.a_h),
        objective_f=reference_objective(assignment.entries, inst),
        trace=tuple(trace),
        discretized_by_fallback=fallback,
        wall_time=time.perf_counter() - started,
    )


def match_piw(instance: ProblemInstance, config: SolverConfig | None = None) -> MatchResult:
    """Matching with every G vertex assigned (L = M), via the ungated objective."""
    config = config or SolverConfig()
    if instance.target_size != instance.m:
        raise ValueError("piw requires target_size == m")
    result = match(instance, replace(config, relaxation=RelaxationKind.PIW))
    row_sums = result.assignment.entries.sum(axis=1)
    if not np.all(row_sums == 1.0):
        raise AssertionError("piw result left a row unmatched")
    return result
