import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fredpairs.errors import ConfigError, InputError
from fredpairs.linalg import (
    Tolerance,
    eigenspace_at,
    is_projection,
    op_norm,
    orth_projector,
    pair_index_finite,
    rank_of,
    restricted_map,
)
from fredpairs.sampling import random_projection


def test_op_norm_examples():
    assert op_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-15)
    assert op_norm(np.zeros((3, 3))) == 0.0
    assert op_norm(np.diag([3, -4j])) == pytest.approx(4.0, abs=1e-14)


def test_op_norm_rejects_nan():
    with pytest.raises(InputError):
        op_norm(np.array([[np.nan]]))


def test_rank_examples(tol):
    assert rank_of(np.eye(5), tol) == 5
    u, v = np.array([1.0, 2.0, 3.0]), np.array([0.5, -1.0, 2.0])
    assert rank_of(np.outer(u, v), tol) == 1
    assert rank_of(np.diag([1.0, 1e-14]), tol) == 1


def test_orth_projector_examples(tol):
    np.testing.assert_allclose(orth_projector([[1, 0]], tol), [[1, 0], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(orth_projector([[1, 1]], tol), [[.5, .5], [.5, .5]], atol=1e-15)
    np.testing.assert_array_equal(orth_projector([], tol, dim=3), np.zeros((3, 3)))
    with pytest.raises(InputError):
        orth_projector([[1, 0], [1, 0, 0]], tol)


def test_is_projection_examples(tol):
    assert is_projection(np.array([[1.0, 0], [0, 0]]), tol)
    assert not is_projection(np.array([[0.0, 1], [0, 0]]), tol)
    assert is_projection(orth_projector([[1, 2, 2]], tol), tol)
    with pytest.raises(InputError):
        is_projection(np.zeros((2, 3)), tol)


def test_restricted_map_examples(tol):
    e1, e2, d = orth_projector([[1, 0]], tol), orth_projector([[0, 1]], tol), orth_projector([[1, 1]], tol)
    assert abs(restricted_map(e1, e1, tol)).item() == pytest.approx(1.0)
    assert abs(restricted_map(e1, e2, tol)).item() == pytest.approx(0.0, abs=1e-15)
    assert abs(restricted_map(d, e1, tol)).item() == pytest.approx(2 ** -0.5, abs=1e-15)
    with pytest.raises(InputError):
        restricted_map(np.array([[0.0, 1], [0, 0]]), e1, tol)


def test_pair_index_examples(tol, rng):
    P = random_projection(5, 2, rng)
    assert pair_index_finite(P, P, tol).index == 0
    assert pair_index_finite(np.eye(2), np.zeros((2, 2)), tol).index == 2
    r = pair_index_finite(orth_projector([[1, 0]], tol), orth_projector([[0, 1]], tol), tol)
    assert (r.index, r.dim_ker, r.dim_coker) == (0, 1, 1)


def test_eigenspace_examples(tol):
    D = np.diag([1.0, -1.0, 0.0])
    V = eigenspace_at(D, 1.0, tol)
    assert V.shape == (3, 1)
    np.testing.assert_allclose(np.abs(V[:, 0]), [1, 0, 0], atol=1e-15)
    assert eigenspace_at(D, 0.5, tol).shape[1] == 0
    V = eigenspace_at(np.diag([1.0, 0.0]), 1.0, tol)
    np.testing.assert_allclose(np.abs(V[:, 0]), [1, 0], atol=1e-15)
    with pytest.raises(InputError):
        eigenspace_at(np.array([[0.0, 1], [0, 0]]), 0.0, tol)


def test_tolerance_validation():
    with pytest.raises(ConfigError):
        Tolerance(rank_tol=0.5)
    with pytest.raises(ConfigError):
        Tolerance(proj_tol=0.0)
    assert not Tolerance.unchecked(rank_tol=0.5).is_sane()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 2**31))
def test_index_is_rank_difference(n, r1, r2, seed):
    rng = np.random.default_rng(seed)
    r1, r2 = min(r1, n), min(r2, n)
    P, Q = random_projection(n, r1, rng), random_projection(n, r2, rng)
    res = pair_index_finite(P, Q)
    assert res.index == r1 - r2
    assert res.dim_ker - res.dim_coker == res.index


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31))
def test_random_projections_are_projections(n, seed):
    rng = np.random.default_rng(seed)
    P = random_projection(n, int(rng.integers(0, n + 1)), rng)
    assert is_projection(P)
    assert op_norm(P) <= 1 + 1e-12
