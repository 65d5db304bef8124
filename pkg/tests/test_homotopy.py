import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fredpairs.blocks import BlockOp, calkin_norm, pair_fredholm
from fredpairs.errors import InputError, NotFredholmError, PreconditionError
from fredpairs.geometry import line_at_angle
from fredpairs.homotopy import involution, involution_inverse, p_path, split_extreme, w_path
from fredpairs.linalg import is_projection, op_norm, rank_of
from fredpairs.sampling import random_block_pair, random_dense_pair, random_projection

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])


def test_involution_examples():
    np.testing.assert_array_equal(involution(np.zeros((2, 2))), np.eye(2))
    np.testing.assert_array_equal(involution(np.eye(2)), -np.eye(2))
    np.testing.assert_array_equal(involution(E1), np.diag([-1.0, 1.0]))
    np.testing.assert_array_equal(involution_inverse(involution(E1)), E1)
    with pytest.raises(InputError):
        involution(np.array([[0.0, 1], [0, 0]]))


def test_w_path_endpoints(rng):
    P0, P1 = random_dense_pair(5, 0.9, rng)
    assert op_norm(w_path(P0, P1, 0.0) - P0) <= 1e-10
    assert op_norm(w_path(P0, P1, 1.0) - P1) <= 1e-10


def test_w_path_constant(rng):
    P = random_projection(4, 2, rng)
    for t in (0.2, 0.5, 0.9):
        assert op_norm(w_path(P, P, t) - P) <= 1e-12


def test_w_path_errors():
    with pytest.raises(PreconditionError):
        w_path(E1, E2, 0.5)
    with pytest.raises(InputError):
        w_path(E1, E1, 1.5)


def test_w_path_blockwise():
    P0 = BlockOp([E1], [line_at_angle(0.2)])
    P1 = BlockOp([line_at_angle(0.5)], [line_at_angle(-0.3)])
    W = w_path(P0, P1, 0.4)
    for k in range(4):
        np.testing.assert_allclose(W.block(k), w_path(P0.block(k), P1.block(k), 0.4), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.0, 1.0))
def test_w_path_stays_close(seed, t):
    rng = np.random.default_rng(seed)
    P0, P1 = random_dense_pair(int(rng.integers(1, 8)), 0.95, rng)
    W = w_path(P0, P1, t)
    assert is_projection(W, slack=1e-8)
    assert op_norm(W - P0) <= op_norm(P1 - P0) + 1e-8
    assert rank_of(W, scale=1) == rank_of(P0, scale=1)


def test_split_examples():
    s = split_extreme(E1, E1)
    assert s.V0.shape[1] == s.V1.shape[1] == 0
    s = split_extreme(E1, np.zeros((2, 2)))
    assert s.V0.shape[1] == 1 and s.V1.shape[1] == 0
    np.testing.assert_allclose(np.abs(s.V0[:, 0]), [1, 0], atol=1e-15)


def test_split_block_cycle_extreme_is_not_fredholm():
    with pytest.raises(NotFredholmError):
        split_extreme(BlockOp([], [E1]), BlockOp([], [E2]))


def test_p_path_dense_endpoints():
    P0 = np.diag([1.0, 0.0, 1.0, 0.0])
    P1 = np.diag([0.0, 1.0, 1.0, 0.0])
    assert op_norm(p_path(P0, P1, 1.0).projection - P1) <= 1e-10
    start = p_path(P0, P1, 0.0).projection
    s = split_extreme(P0, P1)
    assert rank_of(start - P0, scale=1) == s.V0.shape[1] + s.V1.shape[1]


def test_p_path_block_index_constant(rng):
    for _ in range(5):
        P0, P1 = random_block_pair(rng)
        bound = calkin_norm(P1 - P0)
        assert p_path(P0, P1, 1.0).projection.allclose(P1, atol=1e-10)
        indices = set()
        for t in np.linspace(0, 1, 6):
            s = p_path(P0, P1, t)
            assert s.calkin_to_start <= bound + 1e-8
            indices.add(pair_fredholm(s.projection, P0).index)
        assert len(indices) == 1


def test_p_path_needs_fredholm_pair(rng):
    P0, P1 = random_block_pair(rng, fredholm=False)
    with pytest.raises(NotFredholmError):
        p_path(P0, P1, 0.5)
