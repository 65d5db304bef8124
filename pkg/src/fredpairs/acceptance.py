"""Acceptance criteria, runnable from pytest and from ``fredpairs --experiment selftest``.

Each ``criterion_N`` function takes a seed and a tolerance and returns a
:class:`CriterionResult`. Failures are reported, never raised, so that a
selftest run always prints one line per criterion.
"""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .blocks import (
    BlockOp,
    bop_norm,
    calkin_norm,
    index_by_trace,
    pair_fredholm,
    pair_index_oracle,
    tail_norm,
)
from .criteria import cnorm_criterion, graph_criterion, graph_witness, lower_bound_check, sharpness_example
from .geometry import GraphBC, diff_norm_2d, graph_projection, graphest_bound, proj_line2
from .homotopy import p_path, w_path
from .linalg import DEFAULT_TOL, Tolerance, op_norm, pair_index_finite, projection_defect, rank_of
from .lorentz import (
    ModeSpec,
    aps_compactness_check,
    build_model,
    bvp_fredholm,
    final_cnorm,
    final_graph,
    graph_conditions,
    tilted_conditions,
)
from .sampling import random_block_pair, random_dense_pair, random_graph_bc, random_projection

__all__ = ["CriterionResult", "CRITERIA", "run_all", "run_criterion"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float | None = None

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number}. {self.title} ({self.seconds:.2f}s): {self.detail}"


class _Failure(AssertionError):
    pass


def _require(cond, msg: str):
    if not cond:
        raise _Failure(msg)


def _rng(seed: int, number: int) -> np.random.Generator:
    return np.random.default_rng([seed, number])


def _fredholm_corpus(seed: int, n_fredholm: int, n_broken: int):
    rng = _rng(seed, 100)
    pairs = [random_block_pair(rng, max_cycle_dist=0.9) for _ in range(n_fredholm)]
    pairs += [random_block_pair(rng, fredholm=False) for _ in range(n_broken)]
    return pairs


def criterion_0(seed: int, tol: Tolerance) -> str:
    """Tolerance sanity and rank invariants."""
    for n in (1, 4, 9):
        _require(rank_of(np.eye(n), tol) == n, "rank of identity")
    _require(rank_of(np.diag([1.0, 0.1, 0.01]), tol) == 3, "rank of diag(1, 0.1, 0.01) must be 3")
    _require(rank_of(np.diag([1.0, 1e-14]), tol) == 1, "rank of diag(1, 1e-14) must be 1")
    rng = _rng(seed, 0)
    for _ in range(50):
        n = int(rng.integers(1, 17))
        P = random_projection(n, int(rng.integers(0, n + 1)), rng)
        Q = random_projection(n, int(rng.integers(0, n + 1)), rng)
        rp, rq = rank_of(P, tol, scale=1.0), rank_of(Q, tol, scale=1.0)
        a, b = pair_index_finite(P, Q, tol), pair_index_finite(Q, P, tol)
        _require(a.index == rp - rq, "finite pair index must equal the rank difference")
        _require(a.dim_ker == b.dim_coker and a.dim_coker == b.dim_ker, "adjoint swaps kernel and cokernel")
    _require(tol.is_sane(), f"tolerance outside (0, 1e-3): {tol}")
    return "ranks and finite pair indices consistent on 50 random pairs"


def criterion_1(seed: int, tol: Tolerance) -> str:
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(1000):
        a, b = rng.normal(size=2) * rng.choice([1e-3, 1.0, 1e3], size=2)
        err = abs(diff_norm_2d(a, b) - op_norm(proj_line2(a, b) - proj_line2(1.0, 0.0)))
        worst = max(worst, err)
    _require(worst <= 1e-12, f"max error {worst:.3e} > 1e-12")
    return f"max |formula - SVD| = {worst:.2e} over 1000 samples"


def criterion_2(seed: int, tol: Tolerance) -> str:
    rng = _rng(seed, 2)
    worst_defect, worst_excess = 0.0, -np.inf
    for _ in range(200):
        bc = random_graph_bc(rng, max_norm=10.0)
        P = graph_projection(bc, tol)
        worst_defect = max(worst_defect, max(projection_defect(b) for b in P.blocks()))
        worst_excess = max(worst_excess, calkin_norm(P - bc.base) - graphest_bound(bc))
    _require(worst_defect <= 1e-10, f"projection defect {worst_defect:.3e} > 1e-10")
    _require(worst_excess <= 1e-10, f"graphest bound exceeded by {worst_excess:.3e}")
    E1, E2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    worst_eq = 0.0
    for _ in range(200):
        g = rng.uniform(0, 10)
        pre = [random_projection(2, 1, rng)]
        base = BlockOp(pre, [E1])
        G = BlockOp([np.zeros((2, 2))], [g * E2 @ swap @ E1])
        bc = GraphBC(base, G)
        P = graph_projection(bc, tol)
        worst_eq = max(worst_eq, abs(calkin_norm(P - base) - graphest_bound(bc)))
    _require(worst_eq <= 1e-12, f"scalar-block equality off by {worst_eq:.3e}")
    return (f"defect {worst_defect:.1e}, bound slack {worst_excess:.1e}, "
            f"scalar equality {worst_eq:.1e}")


def criterion_3(seed: int, tol: Tolerance) -> str:
    rng = _rng(seed, 3)
    grid = np.linspace(0.0, 1.0, 101)
    worst_defect = worst_end = 0.0
    worst_bound = -np.inf
    for _ in range(100):
        n = int(rng.integers(1, 9))
        P0, P1 = random_dense_pair(n, 0.95, rng)
        dist = op_norm(P1 - P0)
        for t in grid:
            W = w_path(P0, P1, t, tol)
            worst_defect = max(worst_defect, projection_defect(W))
            worst_bound = max(worst_bound, op_norm(W - P0) - dist)
            if t == 0.0:
                worst_end = max(worst_end, op_norm(W - P0))
            elif t == 1.0:
                worst_end = max(worst_end, op_norm(W - P1))
    _require(worst_defect <= 1e-8, f"projection defect {worst_defect:.3e} > 1e-8")
    _require(worst_end <= 1e-10, f"endpoint error {worst_end:.3e} > 1e-10")
    _require(worst_bound <= 1e-8, f"norm bound exceeded by {worst_bound:.3e}")
    worst_calkin = -np.inf
    for _ in range(50):
        P0, P1 = random_block_pair(rng, max_cycle_dist=0.9)
        c = calkin_norm(P1 - P0)
        indices = set()
        prev = None
        for t in grid:
            sample = p_path(P0, P1, t, tol)
            worst_calkin = max(worst_calkin, sample.calkin_to_start - c)
            decision = pair_fredholm(sample.projection, P0, tol)
            _require(decision.fredholm, f"(P(t), P0) not Fredholm at t={t}")
            indices.add(decision.index)
            if prev is not None:
                step = bop_norm(sample.projection - prev)
                _require(step <= 5 * 0.01 * np.pi, f"path jump {step:.3e} at t={t}")
            prev = sample.projection
        _require(len(indices) == 1, f"index not constant along path: {sorted(indices)}")
        _require(p_path(P0, P1, 1.0, tol).projection.allclose(P1, atol=1e-10), "P(1) != P1")
    _require(worst_calkin <= 1e-8, f"Calkin bound exceeded by {worst_calkin:.3e}")
    return (f"defect {worst_defect:.1e}, endpoints {worst_end:.1e}, norm slack {worst_bound:.1e}, "
            f"Calkin slack {worst_calkin:.1e}")


def criterion_4(seed: int, tol: Tolerance) -> str:
    rng = _rng(seed, 4)
    nonzero = 0
    for k in range(200):
        P, P2 = random_block_pair(rng, max_cycle_dist=0.9)
        decision = pair_fredholm(P, P2, tol)
        _require(decision.fredholm, f"pair {k} unexpectedly not Fredholm")
        p, c = max(len(P.prefix), len(P2.prefix)), np.lcm(len(P.cycle), len(P2.cycle))
        oracle = pair_index_oracle(P, P2, int(p + 2 * c), tol)
        _require(oracle == decision.index, f"pair {k}: checker {decision.index} vs oracle {oracle}")
        nonzero += decision.index != 0
    return f"200/200 indices match ({nonzero} nonzero)"


def criterion_5(seed: int, tol: Tolerance) -> str:
    for k in range(1, 6):
        beta = k * np.pi / 12
        P, P2, S = sharpness_example(beta)
        rep = cnorm_criterion(P, P2, S, tol)
        _require(abs(rep.criterion_value - 1.0) <= 1e-12, f"beta={k}pi/12: value {rep.criterion_value!r}")
        _require(not rep.decision.fredholm and not rep.declared, f"beta={k}pi/12: boundary case Fredholm")
        P, P2, S = sharpness_example(beta, shrink=1.0 - 1e-3)
        rep = cnorm_criterion(P, P2, S, tol)
        _require(rep.declared and rep.decision.fredholm, f"beta={k}pi/12: shrunk case not Fredholm")
        _require(rep.consistent, f"beta={k}pi/12: cross-checks failed {rep.cross_checks}")
    return "5 boundary configurations non-Fredholm, shrunk ones Fredholm with index -1"


def criterion_6(seed: int, tol: Tolerance) -> str:
    n = 41
    base_index = None
    for i in range(n):
        for j in range(n):
            g0, g1 = 2.0 * i / (n - 1), 2.0 * j / (n - 1)
            expected = Fraction(2 * i, n - 1) * Fraction(2 * j, n - 1) < 1
            bc0, bc1 = graph_witness(g0, g1)
            rep = graph_criterion(bc0, bc1, tol)
            _require(rep.decision.fredholm == expected, f"({g0}, {g1}): ground truth {rep.decision.status.value}")
            _require(rep.declared == expected, f"({g0}, {g1}): criterion declared={rep.declared}")
            if expected:
                _require(rep.consistent, f"({g0}, {g1}): cross-checks failed {rep.cross_checks}")
                base_index = rep.predicted_index if base_index is None else base_index
                _require(rep.decision.index == base_index, f"({g0}, {g1}): index {rep.decision.index}")
    return f"41x41 grid: decision == (g0 g1 < 1) everywhere, index {base_index} on the Fredholm side"


def criterion_7(seed: int, tol: Tolerance) -> str:
    prev = None
    for z in range(5):
        m = build_model(ModeSpec(n_zero_modes=z), tol)
        chk = aps_compactness_check(m, tol)
        _require(chk.finite_rank and chk.rank == z, f"z={z}: rank(1 - S0 - S1c) = {chk.rank}")
        trace_index = index_by_trace(m.S1c, m.S0.complement(), tol)
        _require(m.aps_index == trace_index, f"z={z}: APS index {m.aps_index} vs trace {trace_index}")
        _require(prev is None or abs(m.aps_index - prev) == 1, f"z={z}: index step {m.aps_index - (prev or 0)}")
        prev = m.aps_index
    m = build_model(ModeSpec(1, [np.pi / 4], [(0.0, 0.0)], 0), tol)
    chk = aps_compactness_check(m, tol)
    _require(chk.offdiag_ranks == (1, 1), f"phi=pi/4: off-diagonal ranks {chk.offdiag_ranks}")
    _require(chk.identity_residual <= 1e-12, "1 - S0 - S1c != Q*(Q-+ - Q+-)")

    m = build_model(ModeSpec(2, [np.pi / 4, -0.6], [(0.3, 1.1), (0.0, 2.0)], 2), tol)
    n = 21
    for i in range(n):
        for j in range(n):
            beta0, beta1 = (np.pi / 2) * i / (n - 1), (np.pi / 2) * j / (n - 1)
            P0, P1 = tilted_conditions(m, beta0, beta1, shift0=1, shift1=-1)
            rep = final_cnorm(m, P0, P1, tol)
            truth = bvp_fredholm(m, P0, P1, tol=tol)
            expected = i + j < n - 1
            _require(rep.declared == expected == truth.fredholm,
                     f"cnorm ({i},{j}): declared={rep.declared} truth={truth.status.value}")
            _require(rep.consistent, f"cnorm ({i},{j}): cross-checks failed {rep.cross_checks}")
            if expected:
                _require(rep.predicted_index == truth.index, f"cnorm ({i},{j}): index mismatch")

            g0, g1 = 2.0 * i / (n - 1), 2.0 * j / (n - 1)
            bc0, bc1 = graph_conditions(m, g0, g1)
            rep = final_graph(m, bc0, bc1, tol)
            truth = bvp_fredholm(m, graph_projection(bc0, tol), graph_projection(bc1, tol), tol=tol)
            expected = i * j < (n - 1) ** 2 // 4
            _require(rep.declared == expected == truth.fredholm,
                     f"graph ({i},{j}): declared={rep.declared} truth={truth.status.value}")
            _require(rep.consistent, f"graph ({i},{j}): cross-checks failed {rep.cross_checks}")
            if expected:
                _require(truth.index == m.aps_index, f"graph ({i},{j}): index {truth.index}")
    return f"zero modes 0..4 ok, offdiag ranks (1, 1), 2x441 grid points agree (APS index {m.aps_index})"


def criterion_8(seed: int, tol: Tolerance) -> str:
    rng = _rng(seed, 8)

    def random_op():
        d = int(rng.integers(1, 5))
        p, c = int(rng.integers(0, 5)), int(rng.integers(1, 4))
        blocks = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(p + c)]
        return BlockOp(blocks[:p], blocks[p:], d)

    for _ in range(50):
        A = random_op()
        p, c = A.shape
        tails = [tail_norm(A, N) for N in range(p + 2 * c + 1)]
        _require(all(x >= y - 1e-15 for x, y in zip(tails, tails[1:])), "tail norms increase")
        _require(all(abs(t - calkin_norm(A)) <= 1e-15 for t in tails[p:]), "tail norm != Calkin norm past prefix")
        _require(calkin_norm(A) <= bop_norm(A), "Calkin norm exceeds operator norm")
        ref = calkin_norm(A)
        for _ in range(20):
            k = int(rng.integers(0, 6))
            scale = rng.uniform(0.1, 100.0)
            new_prefix = [scale * (rng.normal(size=(A.block_dim,) * 2)) for _ in range(k)]
            B = BlockOp(new_prefix, A.cycle, A.block_dim)
            _require(calkin_norm(B) == ref, "prefix rewrite changed the Calkin norm")
    for P, P2 in _fredholm_corpus(seed, 40, 10):
        d, dc = pair_fredholm(P, P2, tol), pair_fredholm(P.complement(), P2.complement(), tol)
        _require(d.status == dc.status, "complement pair has a different status")
        if d.fredholm:
            _require(dc.index == -d.index, "complement pair index is not negated")
            swapped = pair_fredholm(P2, P, tol)
            _require(swapped.index == -d.index, "swapping the pair does not negate the index")
    return "tail norms, prefix invariance (50x20 rewrites), complement mirror on 50 pairs"


def criterion_9(seed: int, tol: Tolerance) -> str:
    corpus = _fredholm_corpus(seed, 180, 20)
    broken = 0
    for k, (P, P2) in enumerate(corpus):
        res = lower_bound_check(P, P2, tol)
        _require(res.agrees_with_fredholm, f"pair {k}: {res}")
        broken += not res.cond2_holds
    _require(broken == 20, f"expected 20 non-Fredholm pairs, got {broken}")
    return "200/200 agree (180 Fredholm, 20 non-Fredholm)"


CRITERIA = {
    0: ("Tolerance and rank invariants", criterion_0, None),
    1: ("Two-dimensional difference-norm formula", criterion_1, 1.0),
    2: ("Graph projections and Calkin bound", criterion_2, 10.0),
    3: ("Homotopy of projections", criterion_3, 60.0),
    4: ("Index oracle equivalence", criterion_4, 60.0),
    5: ("Calkin-sum criterion sharpness", criterion_5, None),
    6: ("Graph-product criterion boundary", criterion_6, None),
    7: ("Toy boundary-value problem", criterion_7, 60.0),
    8: ("Calkin-norm characterizations", criterion_8, None),
    9: ("Lower-bound characterization equivalence", criterion_9, None),
}


def run_criterion(number: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> CriterionResult:
    title, fn, limit = CRITERIA[number]
    start = time.perf_counter()
    try:
        detail = fn(seed, tol)
        passed = True
    except _Failure as exc:
        detail, passed = str(exc), False
    except Exception as exc:  # noqa: BLE001 - any crash is a failed criterion
        detail = f"{type(exc).__name__}: {exc}"
        passed = False
        traceback.print_exc()
    seconds = time.perf_counter() - start
    if passed and limit is not None and seconds >= limit:
        passed = False
        detail = f"runtime {seconds:.2f}s exceeds {limit}s limit; {detail}"
    return CriterionResult(number, title, passed, detail, seconds, limit)


def run_all(seed: int = 0, tol: Tolerance = DEFAULT_TOL, numbers=None) -> list[CriterionResult]:
    return [run_criterion(k, seed, tol) for k in (numbers or sorted(CRITERIA))]
