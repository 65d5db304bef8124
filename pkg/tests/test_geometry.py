import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fredpairs.blocks import BlockOp, calkin_norm, is_block_projection
from fredpairs.errors import InputError
from fredpairs.geometry import (
    GraphBC,
    diff_norm_2d,
    graph_projection,
    graphest_bound,
    line_at_angle,
    principal_angle_sines,
    proj_line2,
)
from fredpairs.linalg import op_norm
from fredpairs.sampling import random_graph_bc, random_projection

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])


def test_proj_line2_examples():
    np.testing.assert_allclose(proj_line2(1, 0), [[1, 0], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(proj_line2(1, 1), [[.5, .5], [.5, .5]], atol=1e-15)
    with pytest.raises(InputError):
        proj_line2(0, 0)


def test_diff_norm_examples():
    assert diff_norm_2d(1, 0) == 0.0
    assert diff_norm_2d(0, 1) == pytest.approx(1.0, abs=1e-15)
    assert diff_norm_2d(1, 1) == pytest.approx(2 ** -0.5, abs=1e-15)
    with pytest.raises(InputError):
        diff_norm_2d(0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_diff_norm_matches_operator_norm(a, b):
    if np.hypot(a, b) < 1e-6:
        return
    assert abs(diff_norm_2d(a, b) - op_norm(proj_line2(a, b) - proj_line2(1, 0))) <= 1e-12


def test_principal_angle_examples(rng):
    P = random_projection(4, 2, rng)
    np.testing.assert_allclose(principal_angle_sines(P, P), 0.0, atol=1e-12)
    np.testing.assert_allclose(principal_angle_sines(E1, E2), [1.0], atol=1e-15)
    np.testing.assert_allclose(principal_angle_sines(E1, proj_line2(1, 1)), [2 ** -0.5], atol=1e-15)
    with pytest.raises(InputError):
        principal_angle_sines(np.array([[0.0, 1], [0, 0]]), E1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31))
def test_largest_sine_is_difference_norm(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    r = int(rng.integers(1, n))
    P, Q = random_projection(n, r, rng), random_projection(n, r, rng)
    s = principal_angle_sines(P, Q)
    assert max(s) == pytest.approx(op_norm(P - Q), abs=1e-10)


def test_graph_of_zero_is_base():
    S = BlockOp([E1], [E2])
    bc = GraphBC(S, BlockOp.zero())
    assert graph_projection(bc).allclose(S)
    assert graphest_bound(bc) == 0.0


def test_graph_scalar_block_bound():
    # G maps e1 to e2 with norm g
    for g in (0.3, 1.0, 4.0):
        bc = GraphBC(BlockOp([], [E1]), BlockOp([], [g * np.array([[0.0, 0], [1, 0]])]))
        P = graph_projection(bc)
        assert is_block_projection(P)
        expected = g / np.hypot(1, g)
        assert calkin_norm(P - bc.base) == pytest.approx(expected, abs=1e-12)
        assert graphest_bound(bc) == pytest.approx(expected, abs=1e-12)
    bc = GraphBC(BlockOp([], [E1]), BlockOp([], [np.array([[0.0, 0], [1, 0]])]))
    assert graphest_bound(bc) == pytest.approx(2 ** -0.5)


def test_graph_rejects_bad_map():
    with pytest.raises(InputError):
        GraphBC(BlockOp([], [E1]), BlockOp([], [np.array([[0.0, 1], [0, 0]])]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_graph_bound_holds(seed):
    bc = random_graph_bc(np.random.default_rng(seed))
    P = graph_projection(bc)
    assert is_block_projection(P)
    assert calkin_norm(P - bc.base) <= graphest_bound(bc) + 1e-10


def test_line_at_angle_is_projection():
    for t in np.linspace(0, np.pi, 7):
        L = line_at_angle(t)
        np.testing.assert_allclose(L @ L, L, atol=1e-15)
        assert np.trace(L) == pytest.approx(1.0)
