"""Sufficient Fredholmness criteria for perturbed pairs of projections.

Two checkers, each returning a :class:`CriterionReport`:

* :func:`cnorm_criterion`: ``||P - S||_C^2 + ||P' - S||_C^2 < 1`` implies
  ``(P, P')`` is Fredholm with ``ind(P, P') = ind(P, S) + ind(S, P')``.
* :func:`graph_criterion`: for graphs of ``G0``, ``G1`` over splittings with
  ``1 - S1 - S0`` compact, ``||G0||_C ||G1||_C < 1`` implies
  ``(P1, 1 - P0)`` is Fredholm with the index of ``(S1, 1 - S0)``.

Both criteria are only sufficient. A report whose criterion fails is
inconclusive; its ``decision`` field always carries the independently
computed ground truth from :func:`~fredpairs.blocks.pair_fredholm`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blocks import (
    BlockOp,
    PairDecision,
    align,
    align_all,
    calkin_norm,
    check_projection,
    is_finite_rank,
    pair_fredholm,
    pair_index_oracle,
)
from .errors import HypothesisViolationError, InputError, NumericalInstabilityError
from .geometry import GraphBC, graph_projection, graphest_bound, line_at_angle
from .linalg import DEFAULT_TOL, Tolerance, range_basis

__all__ = [
    "CriterionReport",
    "cnorm_criterion",
    "LowerBoundResult",
    "lower_bound_check",
    "graph_criterion",
    "sharpness_example",
    "graph_sharpness_example",
    "cnorm_witness",
    "graph_witness",
]

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class CriterionReport:
    criterion_value: float
    declared: bool
    decision: PairDecision
    predicted_index: int | None = None
    cross_checks: dict = field(default_factory=dict)
    threshold: float = 1.0

    def __post_init__(self):
        if (self.predicted_index is not None) != self.declared:
            raise InputError("predicted_index must be present exactly when the criterion declares Fredholm")

    @property
    def consistent(self) -> bool:
        """All cross-checks passed."""
        return all(self.cross_checks.values())

    def to_dict(self) -> dict:
        return {
            "criterion_value": self.criterion_value,
            "threshold": self.threshold,
            "declared": self.declared,
            "status": self.decision.status.value,
            "calkin_gap": self.decision.calkin_gap,
            "index": self.decision.index,
            "predicted_index": self.predicted_index,
            "cross_checks": dict(self.cross_checks),
        }


def _oracle_blocks(A: BlockOp, B: BlockOp) -> int:
    A, B = align(A, B)
    p, c = A.shape
    return p + 2 * c


def cnorm_criterion(P: BlockOp, P2: BlockOp, S: BlockOp, tol: Tolerance = DEFAULT_TOL,
                    oracle: bool = True) -> CriterionReport:
    """Check ``||P - S||_C^2 + ||P2 - S||_C^2 < 1`` and predict the index of ``(P, P2)``."""
    for name, X in (("P", P), ("P'", P2), ("S", S)):
        check_projection(X, tol, name)
    P, P2, S = align_all(P, P2, S)
    value = calkin_norm(P - S) ** 2 + calkin_norm(P2 - S) ** 2
    decision = pair_fredholm(P, P2, tol)
    if value > 1.0 - tol.proj_tol:
        return CriterionReport(value, False, decision)
    left, right = pair_fredholm(P, S, tol), pair_fredholm(S, P2, tol)
    if not (left.fredholm and right.fredholm):
        raise NumericalInstabilityError(
            "criterion holds but a component pair is not Fredholm",
            value=value, left=left.status.value, right=right.status.value,
        )
    predicted = left.index + right.index
    checks = {
        "pair_is_fredholm": decision.fredholm,
        "index_matches": decision.fredholm and decision.index == predicted,
    }
    if oracle and decision.fredholm:
        checks["oracle_matches"] = pair_index_oracle(P, P2, _oracle_blocks(P, P2), tol) == predicted
    return CriterionReport(value, True, decision, predicted, checks)


@dataclass(frozen=True)
class LowerBoundResult:
    epsilon: float
    tail_start: int
    cond2_holds: bool
    cond3_holds: bool
    agrees_with_fredholm: bool
    best_epsilon: float


def _min_gain_svd(Pa: np.ndarray, Pb: np.ndarray, tol: Tolerance) -> float:
    """``min ||Pb x||`` over unit ``x`` in Ran(Pa), from singular values."""
    U = range_basis(Pa, tol)
    if U.shape[1] == 0:
        return np.inf
    return float(np.linalg.svd(Pb @ U, compute_uv=False)[-1])


def _min_gain_rayleigh(Pa: np.ndarray, Pb: np.ndarray, tol: Tolerance) -> float:
    """``min ||Pb x||^2`` over unit ``x`` in Ran(Pa), from the compressed quadratic form."""
    U = range_basis(Pa, tol)
    if U.shape[1] == 0:
        return np.inf
    C = U.conj().T @ Pb @ U
    return float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])


def lower_bound_check(P: BlockOp, P2: BlockOp, tol: Tolerance = DEFAULT_TOL) -> LowerBoundResult:
    """Test the lower-bound characterizations of Fredholmness on the tail subspace.

    ``V`` is the tail after the prefix and ``epsilon = 1 - ||P - P2||_C``.
    Condition 2 is checked with singular values of ``P2`` on Ran(P) (and vice
    versa) over ``V``; condition 3 with the quadratic forms on the
    range-restricted subspaces ``Ran(P) & V``, ``Ran(P2) & V``.
    """
    check_projection(P, tol, "P")
    check_projection(P2, tol, "P'")
    A, B = align(P, P2)
    eps = 1.0 - calkin_norm(A - B)
    slack = 1e-12
    gains = [min(_min_gain_svd(a, b, tol), _min_gain_svd(b, a, tol)) for a, b in zip(A.cycle, B.cycle)]
    quad = [min(_min_gain_rayleigh(a, b, tol), _min_gain_rayleigh(b, a, tol)) for a, b in zip(A.cycle, B.cycle)]
    best = float(min(gains))
    positive = eps > tol.proj_tol
    cond2 = positive and best >= eps - slack
    cond3 = positive and min(quad) >= eps * eps - slack
    fredholm = pair_fredholm(A, B, tol).fredholm
    agrees = cond2 == cond3 == fredholm and ((best > tol.proj_tol) == fredholm)
    return LowerBoundResult(eps, len(A.prefix), cond2, cond3, agrees, best)


def graph_criterion(bc0: GraphBC, bc1: GraphBC, tol: Tolerance = DEFAULT_TOL,
                    s_grid=None) -> CriterionReport:
    """Check ``||G0||_C ||G1||_C < 1`` for the pair ``(P1, 1 - P0)`` of graph projections.

    ``s_grid`` (default ``0, 0.1, ..., 1``) is the set of scalings ``s`` along
    which the index of the graphs of ``s G0``, ``s G1`` must stay constant.
    """
    S0, S1 = bc0.base, bc1.base
    if not is_finite_rank(BlockOp.identity(S0.block_dim) - S1 - S0, tol):
        raise HypothesisViolationError("1 - S1 - S0 is not finite rank")
    value = calkin_norm(bc0.G) * calkin_norm(bc1.G)
    P0, P1 = graph_projection(bc0, tol), graph_projection(bc1, tol)
    decision = pair_fredholm(P1, P0.complement(), tol)
    if value > 1.0 - tol.proj_tol:
        return CriterionReport(value, False, decision)
    base = pair_fredholm(S1, S0.complement(), tol)
    if not base.fredholm:
        raise NumericalInstabilityError("(S1, 1 - S0) is not Fredholm despite finite-rank difference")
    predicted = base.index
    checks = {
        "pair_is_fredholm": decision.fredholm,
        "index_matches": decision.fredholm and decision.index == predicted,
        "graphest_bound_0": bool(calkin_norm(P0 - S0) <= graphest_bound(bc0) + 1e-10),
        "graphest_bound_1": bool(calkin_norm(P1 - S1) <= graphest_bound(bc1) + 1e-10),
    }
    grid = np.linspace(0.0, 1.0, 11) if s_grid is None else s_grid
    constant = True
    for s in grid:
        q0 = graph_projection(bc0.scaled(s), tol)
        q1 = graph_projection(bc1.scaled(s), tol)
        d = pair_fredholm(q1, q0.complement(), tol)
        constant &= d.fredholm and d.index == predicted
    checks["index_constant_along_scaling"] = bool(constant)
    return CriterionReport(value, True, decision, predicted, checks)


def sharpness_example(beta: float, shrink: float = 1.0) -> tuple[BlockOp, BlockOp, BlockOp]:
    """Projections ``(P, P', S)`` sitting on the boundary of the Calkin-sum criterion.

    On every cycle block ``S`` projects onto e1, ``P`` onto the line at angle
    ``beta`` and ``P'`` onto the line at angle ``-shrink * (pi/2 - beta)``.
    With ``shrink = 1`` the ranges of ``P`` and ``P'`` are orthogonal and
    ``||P - S||_C^2 + ||P' - S||_C^2 = sin^2 + cos^2 = 1``; any ``shrink < 1``
    moves strictly inside. One prefix block (``P = 1``, ``S = P' = e1``)
    gives the pair index -1.
    """
    if not 0.0 < beta < np.pi / 2:
        raise InputError("beta must lie strictly inside (0, pi/2)")
    if not 0.0 <= shrink <= 1.0:
        raise InputError("shrink must lie in [0, 1]")
    S = BlockOp([E1], [E1])
    P = BlockOp([np.eye(2)], [line_at_angle(beta)])
    P2 = BlockOp([E1], [line_at_angle(-shrink * (np.pi / 2 - beta))])
    return P, P2, S


def _graph_pair(g0_blocks, g1_blocks) -> tuple[GraphBC, GraphBC]:
    # splitting: Y0 = e1, Y1 = e2 on the cycle; one prefix block with S0 = e1, S1 = 0
    n = len(g0_blocks)
    S0 = BlockOp([E1], [E1] * n)
    S1 = BlockOp([np.zeros((2, 2))], [E2] * n)
    G0 = BlockOp([np.zeros((2, 2))], [g * (E2 @ SWAP @ E1) for g in g0_blocks])
    G1 = BlockOp([np.zeros((2, 2))], [g * (E1 @ SWAP @ E2) for g in g1_blocks])
    return GraphBC(S0, G0), GraphBC(S1, G1)


def graph_sharpness_example(g: float, g1: float | None = None) -> tuple[GraphBC, GraphBC]:
    """Scalar cycle graphs ``G0 = g``, ``G1 = 1/g`` (or ``g1``) over orthogonal lines.

    Per cycle block ``Ran(P1)`` is spanned by ``(g1, 1)`` and ``Ran(1 - P0)``
    by ``(-g, 1)``; they are orthogonal exactly when ``g * g1 = 1``. The base
    pair ``(S1, 1 - S0)`` has index 1.
    """
    if not g > 0:
        raise InputError("g must be positive")
    g1 = 1.0 / g if g1 is None else g1
    return _graph_pair([g], [g1])


def cnorm_witness(x: float, y: float) -> tuple[BlockOp, BlockOp, BlockOp]:
    """Sharpest configuration with ``||P - S||_C = x`` and ``||P' - S||_C = y``.

    When ``x^2 + y^2 >= 1`` a second cycle block with orthogonal ranges is
    added (its distance to ``S`` does not exceed ``y``), so the pair fails
    to be Fredholm exactly on the region where the criterion fails. There
    is no prefix, so the index is 0 wherever the pair is Fredholm.
    """
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise InputError("Calkin distances of projections lie in [0, 1]")
    beta, beta2 = np.arcsin(x), np.arcsin(y)
    cycle_p = [line_at_angle(beta)]
    cycle_p2 = [line_at_angle(-beta2)]
    if x * x + y * y >= 1.0:
        cycle_p.append(line_at_angle(beta))
        cycle_p2.append(line_at_angle(-(np.pi / 2 - beta)))
    n = len(cycle_p)
    return BlockOp([], cycle_p), BlockOp([], cycle_p2), BlockOp([], [E1] * n)


def graph_witness(g0: float, g1: float) -> tuple[GraphBC, GraphBC]:
    """Sharpest graph pair with ``||G0||_C = g0``, ``||G1||_C = g1``.

    When ``g0 * g1 >= 1`` a second cycle block with ``G1 = 1/g0 <= g1`` is
    added, on which the graphs are exactly orthogonal.
    """
    if g0 < 0 or g1 < 0:
        raise InputError("graph norms must be non-negative")
    g0_blocks, g1_blocks = [g0], [g1]
    if g0 * g1 >= 1.0:
        g0_blocks.append(g0)
        g1_blocks.append(1.0 / g0)
    return _graph_pair(g0_blocks, g1_blocks)
