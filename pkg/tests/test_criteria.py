import numpy as np
import pytest

from fredpairs.blocks import BlockOp, Status, calkin_norm, pair_fredholm, pair_index_oracle
from fredpairs.criteria import (
    cnorm_criterion,
    cnorm_witness,
    graph_criterion,
    graph_sharpness_example,
    graph_witness,
    lower_bound_check,
    sharpness_example,
)
from fredpairs.errors import HypothesisViolationError, InputError
from fredpairs.geometry import GraphBC, graph_projection, line_at_angle
from fredpairs.sampling import random_block_pair

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])
NOT_FREDHOLM = (Status.NOT_FREDHOLM, Status.MARGINAL)


def test_cnorm_trivial():
    S = BlockOp([E1], [line_at_angle(0.4)])
    rep = cnorm_criterion(S, S, S)
    assert rep.criterion_value == 0.0
    assert rep.declared and rep.decision.index == 0 == rep.predicted_index
    assert rep.consistent


def test_cnorm_half():
    # sin^2 b + sin^2 b' = 0.5
    b, b2 = np.arcsin(0.5), np.arcsin(0.5)
    S = BlockOp([], [E1])
    rep = cnorm_criterion(BlockOp([], [line_at_angle(b)]), BlockOp([], [line_at_angle(-b2)]), S)
    assert rep.criterion_value == pytest.approx(0.5, abs=1e-12)
    assert rep.declared and rep.decision.fredholm
    assert rep.cross_checks["oracle_matches"]


def test_cnorm_sharpness_inconclusive():
    rep = cnorm_criterion(*sharpness_example(np.pi / 5))
    assert not rep.declared
    assert rep.decision.status in NOT_FREDHOLM
    assert rep.predicted_index is None


def test_sharpness_example_values():
    P, P2, S = sharpness_example(np.pi / 4)
    assert calkin_norm(P - S) == pytest.approx(2 ** -0.5, abs=1e-12)
    assert calkin_norm(P2 - S) == pytest.approx(2 ** -0.5, abs=1e-12)
    assert pair_fredholm(P, P2).status in NOT_FREDHOLM
    P, P2, S = sharpness_example(np.pi / 6)
    assert calkin_norm(P - S) == pytest.approx(0.5, abs=1e-12)
    assert calkin_norm(P2 - S) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    rep = cnorm_criterion(*sharpness_example(np.pi / 6, shrink=1 - 1e-3))
    assert rep.criterion_value < 1 and rep.declared
    assert rep.decision.index == rep.predicted_index
    with pytest.raises(InputError):
        sharpness_example(np.pi / 2)


def test_lower_bound_examples():
    P = BlockOp([E1], [line_at_angle(0.3)])
    r = lower_bound_check(P, P)
    assert r.epsilon == pytest.approx(1.0)
    assert r.cond2_holds and r.cond3_holds and r.agrees_with_fredholm
    r = lower_bound_check(BlockOp([], [E1]), BlockOp([], [line_at_angle(np.pi / 4)]))
    assert r.epsilon == pytest.approx(1 - 2 ** -0.5, abs=1e-12)
    assert r.cond2_holds and r.cond3_holds
    r = lower_bound_check(BlockOp([], [E1]), BlockOp([], [E2]))
    assert r.epsilon <= 1e-12
    assert not (r.cond2_holds or r.cond3_holds)
    assert r.agrees_with_fredholm


def test_lower_bound_random(rng):
    for fredholm in (True, False):
        for _ in range(10):
            assert lower_bound_check(*random_block_pair(rng, fredholm=fredholm)).agrees_with_fredholm


def test_graph_zero_maps_reduce_to_base():
    bc0, bc1 = graph_witness(0.0, 0.0)
    rep = graph_criterion(bc0, bc1)
    base = pair_fredholm(bc1.base, bc0.base.complement())
    assert rep.declared and rep.decision.index == base.index == rep.predicted_index


def test_graph_product_below_one():
    rep = graph_criterion(*graph_witness(0.9, 0.9))
    assert rep.criterion_value == pytest.approx(0.81)
    assert rep.declared and rep.decision.fredholm and rep.consistent


def test_graph_sharpness_examples():
    rep = graph_criterion(*graph_sharpness_example(2.0))
    assert rep.criterion_value == pytest.approx(1.0)
    assert not rep.declared and rep.decision.status in NOT_FREDHOLM
    rep = graph_criterion(*graph_sharpness_example(2.0, 0.45))
    assert rep.criterion_value == pytest.approx(0.9)
    assert rep.declared and rep.decision.fredholm and rep.consistent
    bc0, bc1 = graph_sharpness_example(1.0)
    P0, P1 = graph_projection(bc0), graph_projection(bc1)
    # Ran(P1) and Ran(1 - P0) are orthogonal lines: (1,1) and (-1,1)
    for k in range(1, 3):
        np.testing.assert_allclose(P1.block(k), line_at_angle(np.pi / 4), atol=1e-14)
        np.testing.assert_allclose(P0.complement().block(k), line_at_angle(3 * np.pi / 4), atol=1e-14)
    assert pair_fredholm(P1, P0.complement()).status in NOT_FREDHOLM


def test_graph_criterion_rejects_bad_bases():
    bc = GraphBC(BlockOp([], [E1]), BlockOp.zero())
    with pytest.raises(HypothesisViolationError):
        graph_criterion(bc, bc)


@pytest.mark.parametrize("x,y", [(0.0, 0.0), (0.6, 0.6), (2 ** -0.5, 2 ** -0.5), (0.3, 1.0), (1.0, 1.0)])
def test_cnorm_witness_is_sharp(x, y):
    P, P2, S = cnorm_witness(x, y)
    assert calkin_norm(P - S) == pytest.approx(x, abs=1e-12)
    assert calkin_norm(P2 - S) == pytest.approx(y, abs=1e-12)
    d = pair_fredholm(P, P2)
    assert d.fredholm == (x * x + y * y < 1 - 1e-9)
    if d.fredholm:
        assert d.index == 0 == pair_index_oracle(P, P2, 4)


@pytest.mark.parametrize("g0,g1", [(0.0, 0.0), (0.5, 1.9), (1.1, 1.0), (2.0, 2.0), (0.0, 2.0)])
def test_graph_witness_is_sharp(g0, g1):
    bc0, bc1 = graph_witness(g0, g1)
    assert calkin_norm(bc0.G) == pytest.approx(g0, abs=1e-12)
    assert calkin_norm(bc1.G) == pytest.approx(g1, abs=1e-12)
    rep = graph_criterion(bc0, bc1)
    assert rep.decision.fredholm == (g0 * g1 < 1)
    assert rep.declared == rep.decision.fredholm


def test_report_to_dict():
    d = cnorm_criterion(*cnorm_witness(0.2, 0.3)).to_dict()
    assert d["status"] == "fredholm" and d["declared"] is True
    assert set(d) >= {"criterion_value", "index", "predicted_index", "cross_checks"}
