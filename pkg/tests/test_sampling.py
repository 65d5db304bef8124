import numpy as np
import pytest

from fredpairs.blocks import calkin_norm, is_block_projection, pair_fredholm
from fredpairs.linalg import is_projection, op_norm, rank_of
from fredpairs.sampling import (
    nearby_projection,
    random_block_pair,
    random_graph_bc,
    random_projection,
    random_unitary,
)


def test_random_unitary(rng):
    U = random_unitary(5, rng)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(5), atol=1e-13)


@pytest.mark.parametrize("n,r", [(1, 0), (1, 1), (4, 2), (6, 6)])
def test_random_projection_rank(rng, n, r):
    P = random_projection(n, r, rng)
    assert is_projection(P) and rank_of(P, scale=1) == r


def test_nearby_projection(rng):
    P = random_projection(6, 3, rng)
    for d in (0.1, 0.5, 0.95):
        Q = nearby_projection(P, d, rng)
        assert is_projection(Q)
        assert op_norm(P - Q) <= d + 1e-12


def test_random_block_pairs(rng):
    for _ in range(20):
        P, P2 = random_block_pair(rng)
        assert is_block_projection(P) and is_block_projection(P2)
        assert calkin_norm(P - P2) <= 0.9 + 1e-12
        assert pair_fredholm(P, P2).fredholm
        assert not pair_fredholm(*random_block_pair(rng, fredholm=False)).fredholm


def test_same_seed_same_samples():
    a = random_block_pair(np.random.default_rng(3))
    b = random_block_pair(np.random.default_rng(3))
    assert a[0].allclose(b[0], atol=0) and a[1].allclose(b[1], atol=0)


def test_random_graph_bc(rng):
    for _ in range(20):
        bc = random_graph_bc(rng)
        assert bc.base.block_dim <= 8
        assert calkin_norm(bc.G) <= 10 + 1e-9
