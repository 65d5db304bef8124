"""Mode-decomposed toy model of the APS boundary-value problem.

Boundary data are split into mode pairs, each a copy of C^2 with basis
``(e+, e-)`` for the positive and negative spectral lines of the boundary
operators. Per mode pair:

* the past APS projection ``S0 = P-(0)`` projects onto ``e-``;
* the future APS projection ``P+(1)`` projects onto ``e+``, except on zero
  modes where it vanishes (zero is excluded from the positive spectrum);
* the evolution ``Q`` is ``R(phi) diag(e^{i theta+}, e^{i theta-})`` on the
  finitely many coupled modes and the identity elsewhere;
* ``S1c = Q* P+(1) Q`` is the future condition pulled back to the past.

The Dirac operator itself is never discretized: ``D_{P0,P1}`` is Fredholm
of index k exactly when ``(Q* P1 Q, 1 - P0)`` is a Fredholm pair of index k,
and that reduction is taken as the definition of the model operator.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .blocks import BlockOp, PairDecision, calkin_norm, check_projection, is_finite_rank, pair_fredholm
from .criteria import CriterionReport, cnorm_criterion, graph_criterion
from .errors import ConfigError, HypothesisViolationError, InputError, NumericalInstabilityError
from .geometry import GraphBC, graph_projection, line_at_angle
from .linalg import DEFAULT_TOL, Tolerance, op_norm, rank_of

__all__ = [
    "ModeSpec",
    "ModelBVP",
    "build_model",
    "APSCompactness",
    "aps_compactness_check",
    "bvp_fredholm",
    "final_cnorm",
    "final_graph",
    "tilted_conditions",
    "graph_conditions",
]

E_PLUS = np.diag([1.0, 0.0]).astype(complex)
E_MINUS = np.diag([0.0, 1.0]).astype(complex)
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
ZERO = np.zeros((2, 2), dtype=complex)
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModeSpec:
    n_coupled: int = 0
    coupling_angles: tuple = ()
    phases: tuple = ()
    n_zero_modes: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coupling_angles", tuple(float(a) for a in self.coupling_angles))
        phases = tuple(self.phases) or ((0.0, 0.0),) * self.n_coupled
        object.__setattr__(self, "phases", tuple((float(a), float(b)) for a, b in phases))
        if self.n_coupled < 0 or len(self.coupling_angles) != self.n_coupled:
            raise InputError("coupling_angles must have length n_coupled")
        if len(self.phases) != self.n_coupled:
            raise InputError("phases must have length n_coupled")
        if any(not -np.pi < a < np.pi for a in self.coupling_angles):
            raise InputError("coupling angles must lie in (-pi, pi)")
        if not 0 <= self.n_zero_modes <= 4:
            raise InputError("n_zero_modes must lie in [0, 4]")

    @classmethod
    def from_dict(cls, data: dict) -> "ModeSpec":
        known = {"n_coupled", "coupling_angles", "phases", "n_zero_modes"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown ModeSpec keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (InputError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid ModeSpec: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ModeSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coupling_angles"] = list(self.coupling_angles)
        d["phases"] = [list(p) for p in self.phases]
        return d


@dataclass(frozen=True)
class ModelBVP:
    spec: ModeSpec
    S0: BlockOp
    P_plus: BlockOp
    S1c: BlockOp
    Q: BlockOp
    aps_index: int = field(default=0)

    def conjugate(self, A: BlockOp) -> BlockOp:
        """``Q* A Q``."""
        return self.Q.H @ A @ self.Q


def _evolution_block(phi: float, theta_plus: float, theta_minus: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    R = np.array([[c, -s], [s, c]], dtype=complex)
    return R @ np.diag([np.exp(1j * theta_plus), np.exp(1j * theta_minus)])


def build_model(spec: ModeSpec, tol: Tolerance = DEFAULT_TOL) -> ModelBVP:
    """Assemble the block operators of the model.

    Prefix: ``n_coupled`` coupled mode pairs, then ``n_zero_modes`` zero
    modes. Cycle: one uncoupled mode pair with trivial evolution.
    """
    q_prefix = [_evolution_block(phi, *th) for phi, th in zip(spec.coupling_angles, spec.phases)]
    q_prefix += [I2] * spec.n_zero_modes
    plus_prefix = [E_PLUS] * spec.n_coupled + [ZERO] * spec.n_zero_modes
    n = len(q_prefix)
    Q = BlockOp(q_prefix, [I2])
    P_plus = BlockOp(plus_prefix, [E_PLUS])
    S0 = BlockOp([E_MINUS] * n, [E_MINUS])
    for q in Q.blocks():
        if op_norm(q.conj().T @ q - I2) > tol.proj_tol:
            raise NumericalInstabilityError("evolution block is not unitary")
    S1c = (Q.H @ P_plus @ Q).map(lambda b: (b + b.conj().T) / 2)
    if not is_finite_rank(BlockOp.identity(2) - S0 - S1c, tol):
        raise NumericalInstabilityError("1 - S0 - S1c is not finite rank")
    aps = pair_fredholm(S1c, S0.complement(), tol)
    if not aps.fredholm:
        raise NumericalInstabilityError("APS conditions do not give a Fredholm pair")
    return ModelBVP(spec, S0, P_plus, S1c, Q, aps.index)


@dataclass(frozen=True)
class APSCompactness:
    finite_rank: bool
    rank: int
    offdiag_ranks: tuple[int, int]
    identity_residual: float


def _prefix_rank(A: BlockOp, tol: Tolerance) -> int:
    if not is_finite_rank(A, tol):
        raise NumericalInstabilityError("operator has support on the cycle")
    return sum(rank_of(b, tol, scale=1.0) for b in A.prefix)


def aps_compactness_check(m: ModelBVP, tol: Tolerance = DEFAULT_TOL) -> APSCompactness:
    """Rank of ``1 - S0 - S1c`` and of ``Q+- = P+ Q P-``, ``Q-+ = (1 - P+) Q (1 - P-)``.

    Also reports ``||(1 - S0 - S1c) - Q*(Q-+ - Q+-)||``, which must vanish.
    """
    one = BlockOp.identity(2)
    D = one - m.S0 - m.S1c
    q_pm = m.P_plus @ m.Q @ m.S0
    q_mp = m.P_plus.complement() @ m.Q @ m.S0.complement()
    residual = max(op_norm(b) for b in (D - m.Q.H @ (q_mp - q_pm)).blocks())
    return APSCompactness(
        finite_rank=is_finite_rank(D, tol),
        rank=_prefix_rank(D, tol),
        offdiag_ranks=(_prefix_rank(q_pm, tol), _prefix_rank(q_mp, tol)),
        identity_residual=residual,
    )


def bvp_fredholm(m: ModelBVP, P0: BlockOp, P1: BlockOp, conjugated: bool = False,
                 tol: Tolerance = DEFAULT_TOL) -> PairDecision:
    """Fredholmness and index of the model operator with boundary projections ``P0``, ``P1``.

    ``P1`` is the future condition; it is pulled back by ``Q`` unless
    ``conjugated`` says this was already done.
    """
    P1c = P1 if conjugated else m.conjugate(P1).map(lambda b: (b + b.conj().T) / 2)
    return pair_fredholm(P1c, P0.complement(), tol)


def final_cnorm(m: ModelBVP, P0: BlockOp, P1: BlockOp, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    """Calkin-distance criterion for perturbed APS conditions.

    Criterion value ``||P1 - P+(1)||_C^2 + ||P0 - P-(0)||_C^2``; when it is
    below 1 the predicted index is
    ``ind(D_APS) + ind(P0, P-(0)) + ind(P1, P+(1))``.
    """
    check_projection(P0, tol, "P0")
    check_projection(P1, tol, "P1")
    d1 = calkin_norm(P1 - m.P_plus)
    d0 = calkin_norm(P0 - m.S0)
    value = d1 * d1 + d0 * d0
    P1c = m.conjugate(P1).map(lambda b: (b + b.conj().T) / 2)
    truth = bvp_fredholm(m, P0, P1c, conjugated=True, tol=tol)
    checks = {
        "conjugation_preserves_calkin": abs(calkin_norm(P1c - m.S1c) - d1) <= 1e-12,
        "aps_transport": abs(calkin_norm(P1c - m.S0.complement()) - d1) <= 1e-12,
    }
    if value > 1.0 - tol.proj_tol:
        return CriterionReport(value, False, truth, None, checks)
    i0, i1 = pair_fredholm(P0, m.S0, tol), pair_fredholm(P1, m.P_plus, tol)
    if not (i0.fredholm and i1.fredholm):
        raise NumericalInstabilityError("criterion holds but a boundary pair is not Fredholm")
    predicted = m.aps_index + i0.index + i1.index
    # same statement after transport: (Q* P1 Q, 1 - P0) against S = 1 - P-(0)
    transported = cnorm_criterion(P1c, P0.complement(), m.S0.complement(), tol, oracle=False)
    checks.update(
        pair_is_fredholm=truth.fredholm,
        index_matches=truth.fredholm and truth.index == predicted,
        transported_criterion_agrees=transported.declared and transported.predicted_index == predicted,
    )
    return CriterionReport(value, True, truth, predicted, checks)


def final_graph(m: ModelBVP, bc0: GraphBC, bc1: GraphBC, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    """Graph criterion for perturbations of the APS conditions.

    ``bc0`` must be a graph over Ran(P-(0)) and ``bc1`` over Ran(P+(1)). The
    future graph is pulled back by ``Q`` (the graph of ``Q* G1 Q`` over
    Ran(S1c)) before :func:`~fredpairs.criteria.graph_criterion` is applied.
    """
    if not (bc0.base.allclose(m.S0) and bc1.base.allclose(m.P_plus)):
        raise HypothesisViolationError("graph bases must be the model's APS projections")
    bc1c = GraphBC(m.S1c, m.conjugate(bc1.G), tol)
    report = graph_criterion(bc0, bc1c, tol)
    P0, P1 = graph_projection(bc0, tol), graph_projection(bc1, tol)
    truth = bvp_fredholm(m, P0, P1, tol=tol)
    checks = dict(report.cross_checks)
    checks["graph_transport"] = m.conjugate(P1).allclose(graph_projection(bc1c, tol), atol=1e-10)
    checks["agrees_with_bvp"] = (truth.status, truth.index) == (report.decision.status, report.decision.index)
    if report.declared:
        checks["aps_index"] = report.predicted_index == m.aps_index
    return CriterionReport(report.criterion_value, report.declared, truth, report.predicted_index, checks)


def _bump(block: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return block
    target = I2 if shift > 0 else ZERO
    if abs(np.trace(target - block).real - shift) > 0.5:
        raise InputError(f"cannot shift rank of block by {shift}")
    return target


def tilted_conditions(m: ModelBVP, beta0: float, beta1: float, shift0: int = 0, shift1: int = 0,
                      sharp: bool = True) -> tuple[BlockOp, BlockOp]:
    """Boundary projections tilted away from APS on every cycle mode.

    ``P0`` is the line at angle ``beta0`` from ``e-`` and ``P1`` the line at
    angle ``beta1`` from ``e+`` (on the opposite side), so that
    ``||P0 - P-(0)||_C = sin(beta0)`` and ``||P1 - P+(1)||_C = sin(beta1)``.
    ``shift0``/``shift1`` replace the first prefix block by the full or zero
    projection to change the rank by +-1. With ``sharp`` set, a second cycle
    mode sits exactly at the non-Fredholm boundary whenever
    ``beta0 + beta1 >= pi/2``.
    """
    if not (0.0 <= beta0 <= np.pi / 2 and 0.0 <= beta1 <= np.pi / 2):
        raise InputError("tilt angles must lie in [0, pi/2]")
    c0, c1 = [line_at_angle(np.pi / 2 + beta0)], [line_at_angle(-beta1)]
    if sharp and beta0 + beta1 >= np.pi / 2:
        c0.append(line_at_angle(np.pi / 2 + beta0))
        c1.append(line_at_angle(-(np.pi / 2 - beta0)))
    p0, p1 = list(m.S0.prefix), list(m.P_plus.prefix)
    if (shift0 or shift1) and not p0:
        raise InputError("rank shifts need at least one prefix mode")
    if p0:
        p0[0], p1[0] = _bump(p0[0], shift0), _bump(p1[0], shift1)
    return BlockOp(p0, c0), BlockOp(p1, c1)


def graph_conditions(m: ModelBVP, g0: float, g1: float, sharp: bool = True) -> tuple[GraphBC, GraphBC]:
    """Graph conditions over the APS splittings with cycle norms ``g0``, ``g1``.

    ``G0`` maps ``e-`` to ``g0 e+`` and ``G1`` maps ``e+`` to ``g1 e-`` on
    every cycle mode (prefix maps vanish). With ``sharp`` set and
    ``g0 g1 >= 1`` a second cycle mode carries ``G1 = 1/g0``, where the pulled
    back graphs are exactly orthogonal.
    """
    if g0 < 0 or g1 < 0:
        raise InputError("graph norms must be non-negative")
    g0s, g1s = [g0], [g1]
    if sharp and g0 * g1 >= 1.0:
        g0s.append(g0)
        g1s.append(1.0 / g0)
    n = len(g0s)
    n_pre = len(m.S0.prefix)
    S0 = BlockOp(m.S0.prefix, [E_MINUS] * n)
    Pp = BlockOp(m.P_plus.prefix, [E_PLUS] * n)
    G0 = BlockOp([ZERO] * n_pre, [g * (E_PLUS @ SWAP @ E_MINUS) for g in g0s])
    G1 = BlockOp([ZERO] * n_pre, [g * (E_MINUS @ SWAP @ E_PLUS) for g in g1s])
    return GraphBC(S0, G0), GraphBC(Pp, G1)
