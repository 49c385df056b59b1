"""Structural discrepancy objectives, their relaxations, and gradients.

The reference discrepancy between the selected subgraphs is

    H0(X) = || U o A_G - X A_H X^T ||_F^2,   U = X 1 X^T,

which counts, over the selected vertex pairs, the squared weight differences
between corresponding edges.  H0 is piecewise-defined through the gating mask
U and is awkward to differentiate, so minimization works on smooth surrogates
that agree with H0 on binary assignments and differ only inside the polytope:

* ``H1`` keeps the gate on the first expansion term only; quartic in X.
* ``H2`` replaces the gate by X X^T everywhere; sextic in X.
* ``PIW`` drops the gate entirely; valid when L = M because then every row
  sum equals one and the gate is identically one.

The full objective blends a structural term with a linear vertex cost:

    F(X) = alpha * H(X) + (1 - alpha) * <C, X>.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .types import ProblemInstance, matrix_of, selection_mask


class RelaxationKind(str, Enum):
    H1 = "h1"
    H2 = "h2"
    PIW = "piw"


def reference_value(x, a_g: np.ndarray, a_h: np.ndarray) -> float:
    """Gated squared discrepancy H0; the ground-truth notion of match quality."""
    mat = matrix_of(x)
    mask = selection_mask(mat)
    diff = mask * a_g - mat @ a_h @ mat.T
    return float(np.vdot(diff, diff))


def _h1_value(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> float:
    r = x.sum(axis=1)
    u = np.outer(r, r)
    w = x @ a_h @ x.T
    # <A o A, U> - 2 <A, W> + <W, W>: the gate only survives on the pure-G term.
    return float(np.vdot(a_g * a_g, u) - 2.0 * np.vdot(a_g, w) + np.vdot(w, w))


def _h1_gradient(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> np.ndarray:
    r = x.sum(axis=1)
    sq = a_g * a_g
    xtx = x.T @ x
    gate_term = (sq + sq.T) @ r  # constant across each row, broadcast below
    cross_term = a_g.T @ x @ a_h + a_g @ x @ a_h.T
    pure_term = x @ (a_h @ xtx @ a_h.T + a_h.T @ xtx @ a_h)
    return gate_term[:, None] - 2.0 * cross_term + 2.0 * pure_term


def _h2_value(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> float:
    p = x @ x.T
    w = x @ a_h @ x.T
    t1 = float(np.trace(p @ a_g.T @ p @ a_g @ p))
    t2 = float(np.trace(p @ a_g.T @ w))
    t3 = float(np.vdot(w, w))
    return t1 - 2.0 * t2 + t3


def _h2_gradient(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> np.ndarray:
    p = x @ x.T
    xtx = x.T @ x
    ap = a_g @ p
    pa = p @ a_g
    grad_t1 = 2.0 * ((p @ a_g.T @ pa) @ x + (a_g.T @ pa @ p) @ x + (ap @ p @ a_g.T) @ x)
    grad_t2 = (
        x @ a_h.T @ x.T @ a_g @ x
        + a_g.T @ x @ a_h @ xtx
        + ap @ x @ a_h.T
        + p @ a_g.T @ x @ a_h
    )
    grad_t3 = 2.0 * x @ (a_h.T @ xtx @ a_h + a_h @ xtx @ a_h.T)
    return grad_t1 - 2.0 * grad_t2 + grad_t3


def _piw_value(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> float:
    diff = a_g - x @ a_h @ x.T
    return float(np.vdot(diff, diff))


def _piw_gradient(x: np.ndarray, a_g: np.ndarray, a_h: np.ndarray) -> np.ndarray:
    xtx = x.T @ x
    pure_term = x @ (a_h.T @ xtx @ a_h + a_h @ xtx @ a_h.T)
    cross_term = a_g @ x @ a_h.T + a_g.T @ x @ a_h
    return 2.0 * (pure_term - cross_term)


_VALUE = {
    RelaxationKind.H1: _h1_value,
    RelaxationKind.H2: _h2_value,
    RelaxationKind.PIW: _piw_value,
}
_GRADIENT = {
    RelaxationKind.H1: _h1_gradient,
    RelaxationKind.H2: _h2_gradient,
    RelaxationKind.PIW: _piw_gradient,
}

# Highest polynomial degree of each surrogate along a line segment; an exact
# line search can fit the restriction with degree + 1 samples.
SEGMENT_DEGREE = {
    RelaxationKind.H1: 4,
    RelaxationKind.H2: 6,
    RelaxationKind.PIW: 4,
}


def structural_value(x, a_g: np.ndarray, a_h: np.ndarray, kind: RelaxationKind | str) -> float:
    return _VALUE[RelaxationKind(kind)](matrix_of(x), a_g, a_h)


def structural_gradient(
    x, a_g: np.ndarray, a_h: np.ndarray, kind: RelaxationKind | str
) -> np.ndarray:
    return _GRADIENT[RelaxationKind(kind)](matrix_of(x), a_g, a_h)


def objective_value(x, instance: ProblemInstance, kind: RelaxationKind | str) -> float:
    mat = matrix_of(x)
    structural = structural_value(mat, instance.a_g, instance.a_h, kind)
    if instance.alpha == 1.0:
        return structural
    linear = float(np.vdot(instance.cost_entries, mat))
    return instance.alpha * structural + (1.0 - instance.alpha) * linear


def objective_gradient(
    x,
    instance: ProblemInstance,
    kind: RelaxationKind | str,
    *,
    blend_structure: bool = True,
) -> np.ndarray:
    """Gradient of the blended objective.

    With ``blend_structure`` (the default) the structural gradient carries its
    alpha weight, so the result is the exact derivative of
    :func:`objective_value`.  Setting it to False leaves the structural part
    unweighted, a shorthand sometimes used where only the linear term is
    scaled; the two coincide at alpha = 1.
    """
    mat = matrix_of(x)
    structural = structural_gradient(mat, instance.a_g, instance.a_h, kind)
    if instance.alpha == 1.0:
        return structural
    weight = instance.alpha if blend_structure else 1.0
    return weight * structural + (1.0 - instance.alpha) * instance.cost_entries


def reference_objective(x, instance: ProblemInstance) -> float:
    """Blended objective with the gated discrepancy as the structural term."""
    mat = matrix_of(x)
    structural = reference_value(mat, instance.a_g, instance.a_h)
    linear = float(np.vdot(instance.cost_entries, mat))
    return instance.alpha * structural + (1.0 - instance.alpha) * linear


def _structure_segment(
    x: np.ndarray, d: np.ndarray, a_g: np.ndarray, a_h: np.ndarray, kind: RelaxationKind
) -> np.ndarray:
    """Coefficients (ascending) of t -> H(X + tD) for the quartic surrogates.

    Writing P(t) = (X+tD) A_H (X+tD)^T = P0 + t P1 + t^2 P2, both h1 and piw
    are built from <A, P(t)> and ||P(t)||^2, plus h1's gate term which is
    quadratic in the row sums.
    """
    xb = x @ a_h
    db = d @ a_h
    p0 = xb @ x.T
    p1 = xb @ d.T + db @ x.T
    p2 = db @ d.T
    coeffs = np.array(
        [
            np.vdot(p0, p0),
            2.0 * np.vdot(p0, p1),
            2.0 * np.vdot(p0, p2) + np.vdot(p1, p1),
            2.0 * np.vdot(p1, p2),
            np.vdot(p2, p2),
        ]
    )
    coeffs[0] -= 2.0 * np.vdot(a_g, p0)
    coeffs[1] -= 2.0 * np.vdot(a_g, p1)
    coeffs[2] -= 2.0 * np.vdot(a_g, p2)
    if kind is RelaxationKind.PIW:
        coeffs[0] += np.vdot(a_g, a_g)
    elif kind is RelaxationKind.H1:
        sq = a_g * a_g
        rx = x.sum(axis=1)
        rd = d.sum(axis=1)
        coeffs[0] += rx @ sq @ rx
        coeffs[1] += rx @ sq @ rd + rd @ sq @ rx
        coeffs[2] += rd @ sq @ rd
    else:
        raise ValueError(f"no closed segment form for {kind.value}")
    return coeffs


def graduated_segment(
    x, d, instance: ProblemInstance, kind: RelaxationKind | str, zeta: float
) -> np.ndarray:
    """Quartic coefficients of t -> graduated_value(X + tD) for h1 and piw."""
    zeta = _check_zeta(zeta)
    mat = matrix_of(x)
    step = matrix_of(d)
    coeffs = _structure_segment(mat, step, instance.a_g, instance.a_h, RelaxationKind(kind))
    if instance.alpha != 1.0:
        coeffs *= instance.alpha
        coeffs[0] += (1.0 - instance.alpha) * float(np.vdot(instance.cost_entries, mat))
        coeffs[1] += (1.0 - instance.alpha) * float(np.vdot(instance.cost_entries, step))
    coeffs *= 1.0 - abs(zeta)
    coeffs[0] += zeta * float(np.vdot(mat, mat))
    coeffs[1] += 2.0 * zeta * float(np.vdot(mat, step))
    coeffs[2] += zeta * float(np.vdot(step, step))
    return coeffs


def _check_zeta(zeta: float) -> float:
    if not -1.0 <= zeta <= 1.0:
        raise ValueError(f"zeta must lie in [-1, 1], got {zeta}")
    return zeta


def graduated_value(
    x, instance: ProblemInstance, kind: RelaxationKind | str, zeta: float
) -> float:
    """Continuation objective: (1 - |zeta|) F(X) + zeta ||X||_F^2.

    At zeta = 1 the problem is the pure convex norm, at zeta = -1 pure
    concave; sliding zeta from 1 to -1 deforms a convex start into a concave
    finish whose minimizers are extreme points, i.e. binary assignments.
    """
    zeta = _check_zeta(zeta)
    mat = matrix_of(x)
    return (1.0 - abs(zeta)) * objective_value(mat, instance, kind) + zeta * float(
        np.vdot(mat, mat)
    )


def graduated_gradient(
    x,
    instance: ProblemInstance,
    kind: RelaxationKind | str,
    zeta: float,
    *,
    blend_structure: bool = True,
) -> np.ndarray:
    zeta = _check_zeta(zeta)
    mat = matrix_of(x)
    grad_f = objective_gradient(mat, instance, kind, blend_structure=blend_structure)
    return (1.0 - abs(zeta)) * grad_f + 2.0 * zeta * mat
