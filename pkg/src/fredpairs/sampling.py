"""Seeded random generators for projections, block pairs and graph conditions."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .blocks import BlockOp
from .geometry import GraphBC
from .linalg import op_norm


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Qm, R = np.linalg.qr(Z)
    return Qm * (np.diag(R) / np.abs(np.diag(R)))


def random_projection(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    U = random_unitary(n, rng)[:, :rank]
    P = U @ U.conj().T
    return (P + P.conj().T) / 2


def nearby_projection(P: np.ndarray, max_dist: float, rng: np.random.Generator) -> np.ndarray:
    """Unitary conjugate of ``P`` with ``||P' - P|| <= max_dist`` (same rank)."""
    n = P.shape[0]
    H = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = (H + H.conj().T) / 2
    H /= op_norm(H)
    s = rng.uniform(0.05, 1.5)
    while True:
        U = scipy.linalg.expm(1j * s * H)
        P2 = U @ P @ U.conj().T
        P2 = (P2 + P2.conj().T) / 2
        if op_norm(P2 - P) <= max_dist:
            return P2
        s /= 2


def random_dense_pair(n: int, max_dist: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    P0 = random_projection(n, int(rng.integers(0, n + 1)), rng)
    return P0, nearby_projection(P0, max_dist, rng)


def random_block_pair(rng: np.random.Generator, d: int | None = None, prefix_len: int | None = None,
                      cycle_len: int | None = None, max_cycle_dist: float = 0.9,
                      fredholm: bool = True) -> tuple[BlockOp, BlockOp]:
    """Eventually-periodic pair of block projections.

    Prefix blocks are independent projections of random rank. Cycle blocks of
    the second operator are unitary conjugates of the first within
    ``max_cycle_dist``; with ``fredholm=False`` one cycle block instead gets a
    different rank, which puts it at distance exactly 1.
    """
    d = int(rng.integers(2, 5)) if d is None else d
    prefix_len = int(rng.integers(0, 4)) if prefix_len is None else prefix_len
    cycle_len = int(rng.integers(1, 4)) if cycle_len is None else cycle_len
    pre_a = [random_projection(d, int(rng.integers(0, d + 1)), rng) for _ in range(prefix_len)]
    pre_b = [random_projection(d, int(rng.integers(0, d + 1)), rng) for _ in range(prefix_len)]
    cyc_a, cyc_b = [], []
    for _ in range(cycle_len):
        a = random_projection(d, int(rng.integers(0, d + 1)), rng)
        cyc_a.append(a)
        cyc_b.append(nearby_projection(a, max_cycle_dist, rng))
    if not fredholm:
        j = int(rng.integers(0, cycle_len))
        r = int(round(np.trace(cyc_a[j]).real))
        cyc_b[j] = random_projection(d, r + 1 if r < d else r - 1, rng)
    return BlockOp(pre_a, cyc_a, d), BlockOp(pre_b, cyc_b, d)


def random_graph_bc(rng: np.random.Generator, d: int | None = None, prefix_len: int | None = None,
                    cycle_len: int | None = None, max_norm: float = 10.0) -> GraphBC:
    """Random base splitting with a random G of operator norm at most ``max_norm``."""
    d = int(rng.integers(2, 9)) if d is None else d
    prefix_len = int(rng.integers(0, 3)) if prefix_len is None else prefix_len
    cycle_len = int(rng.integers(1, 4)) if cycle_len is None else cycle_len
    n = prefix_len + cycle_len
    S_blocks, G_blocks = [], []
    for _ in range(n):
        s = random_projection(d, int(rng.integers(0, d + 1)), rng)
        X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        g = (np.eye(d) - s) @ X @ s
        norm = op_norm(g)
        if norm > 1e-8:
            g *= rng.uniform(0, max_norm) / norm
        else:
            g = np.zeros((d, d), dtype=complex)
        S_blocks.append(s)
        G_blocks.append(g)
    base = BlockOp(S_blocks[:prefix_len], S_blocks[prefix_len:], d)
    G = BlockOp(G_blocks[:prefix_len], G_blocks[prefix_len:], d)
    return GraphBC(base, G)
