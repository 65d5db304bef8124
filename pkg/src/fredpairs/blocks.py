"""Eventually-periodic block-diagonal operators on H = C^d + C^d + ...

A :class:`BlockOp` is a finite prefix of arbitrary ``d x d`` blocks followed
by a finite cycle repeated forever. On this class of operators the operator
norm, the Calkin (essential) norm, compactness and the index of a pair of
projections are all exactly computable:

* compact is the same as finite rank (the cycle is zero),
* the Calkin norm is the largest norm among the cycle blocks,
* a pair of projections at Calkin distance < 1 has equal ranks on every
  cycle block, so only the prefix carries index.

:func:`pair_index_oracle` recomputes the index from dense truncations and is
kept independent of the blockwise bookkeeping in :func:`pair_fredholm`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np
import scipy.linalg

from .errors import InputError, NotFredholmError, NumericalInstabilityError, PreconditionError
from .linalg import DEFAULT_TOL, Tolerance, as_dense, is_projection, op_norm, pair_index_finite, rank_of

__all__ = [
    "BlockOp",
    "align",
    "block_algebra",
    "adjoint",
    "scale",
    "bop_norm",
    "calkin_norm",
    "tail_norm",
    "is_finite_rank",
    "truncate",
    "check_projection",
    "is_block_projection",
    "Status",
    "PairDecision",
    "pair_fredholm",
    "pair_index_oracle",
    "index_by_trace",
]


def _freeze(block, d: int | None) -> np.ndarray:
    A = as_dense(block, square=True).copy()
    if d is not None and A.shape[0] != d:
        raise InputError(f"block has size {A.shape[0]}, expected {d}")
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class BlockOp:
    """Block-diagonal operator ``diag(prefix..., cycle, cycle, ...)``."""

    prefix: tuple
    cycle: tuple
    block_dim: int

    def __init__(self, prefix: Sequence = (), cycle: Sequence = (), block_dim: int | None = None):
        prefix, cycle = list(prefix), list(cycle)
        if not cycle:
            raise InputError("cycle must be non-empty")
        d = block_dim
        if d is None:
            d = np.asarray(cycle[0]).shape[0]
        prefix_t = tuple(_freeze(b, d) for b in prefix)
        cycle_t = tuple(_freeze(b, d) for b in cycle)
        object.__setattr__(self, "prefix", prefix_t)
        object.__setattr__(self, "cycle", cycle_t)
        object.__setattr__(self, "block_dim", int(d))

    # constructors

    @classmethod
    def identity(cls, d: int = 2) -> "BlockOp":
        return cls((), [np.eye(d)], d)

    @classmethod
    def zero(cls, d: int = 2) -> "BlockOp":
        return cls((), [np.zeros((d, d))], d)

    # shape and access

    @property
    def shape(self) -> tuple[int, int]:
        """``(prefix length, cycle length)``."""
        return len(self.prefix), len(self.cycle)

    def block(self, i: int) -> np.ndarray:
        """The ``i``-th diagonal block (0-based)."""
        p, c = self.shape
        if i < p:
            return self.prefix[i]
        return self.cycle[(i - p) % c]

    def blocks(self) -> Iterator[np.ndarray]:
        """All distinct stored blocks, prefix first."""
        yield from self.prefix
        yield from self.cycle

    def unrolled(self, prefix_len: int, cycle_len: int) -> "BlockOp":
        """Same operator stored with a longer prefix and/or a repeated cycle."""
        p, c = self.shape
        if prefix_len < p or cycle_len % c:
            raise InputError(f"cannot unroll shape {(p, c)} to {(prefix_len, cycle_len)}")
        prefix = [self.block(i) for i in range(prefix_len)]
        cycle = [self.block(prefix_len + j) for j in range(cycle_len)]
        return BlockOp(prefix, cycle, self.block_dim)

    def canonical(self, atol: float = 0.0) -> "BlockOp":
        """Minimal representation: shortest cycle, trailing prefix absorbed into it."""
        cycle = list(self.cycle)
        c = len(cycle)
        for period in range(1, c + 1):
            if c % period == 0 and all(
                np.allclose(cycle[j], cycle[j % period], rtol=0, atol=atol) for j in range(c)
            ):
                cycle = cycle[:period]
                break
        prefix = list(self.prefix)
        while prefix and np.allclose(prefix[-1], cycle[-1], rtol=0, atol=atol):
            prefix.pop()
            cycle = [cycle[-1]] + cycle[:-1]
        return BlockOp(prefix, cycle, self.block_dim)

    def map(self, f: Callable[[np.ndarray], np.ndarray]) -> "BlockOp":
        """Apply ``f`` to every block."""
        return BlockOp([f(b) for b in self.prefix], [f(b) for b in self.cycle], self.block_dim)

    def allclose(self, other: "BlockOp", atol: float = 1e-12) -> bool:
        A, B = align(self, other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(A.blocks(), B.blocks()))

    # algebra

    def __add__(self, other):
        return block_algebra(self, other, "add")

    def __sub__(self, other):
        return block_algebra(self, other, "sub")

    def __matmul__(self, other):
        return block_algebra(self, other, "compose")

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, s):
        if isinstance(s, BlockOp):
            return NotImplemented
        return scale(self, s)

    __rmul__ = __mul__

    def adjoint(self) -> "BlockOp":
        return self.map(lambda b: b.conj().T)

    @property
    def H(self) -> "BlockOp":
        return self.adjoint()

    def complement(self) -> "BlockOp":
        """``1 - self``."""
        return BlockOp.identity(self.block_dim) - self

    # serialization

    def to_dict(self) -> dict:
        def enc(b):
            return [[[float(z.real), float(z.imag)] for z in row] for row in b]

        return {
            "block_dim": self.block_dim,
            "prefix": [enc(b) for b in self.prefix],
            "cycle": [enc(b) for b in self.cycle],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlockOp":
        try:
            d = int(data["block_dim"])

            def dec(b):
                arr = np.array(b, dtype=float)
                if arr.shape != (d, d, 2):
                    raise InputError(f"block entries have shape {arr.shape}, expected {(d, d, 2)}")
                return arr[..., 0] + 1j * arr[..., 1]

            return cls([dec(b) for b in data["prefix"]], [dec(b) for b in data["cycle"]], d)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed BlockOp document: {exc}") from exc

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def loads(cls, text: str) -> "BlockOp":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"BlockOp(block_dim={self.block_dim}, shape={self.shape})"


def align(A: BlockOp, B: BlockOp) -> tuple[BlockOp, BlockOp]:
    """Common representation: max prefix length, lcm of cycle lengths."""
    if A.block_dim != B.block_dim:
        raise InputError(f"block_dim mismatch: {A.block_dim} vs {B.block_dim}")
    p = max(len(A.prefix), len(B.prefix))
    c = math.lcm(len(A.cycle), len(B.cycle))
    return A.unrolled(p, c), B.unrolled(p, c)


def align_all(*ops: BlockOp) -> list[BlockOp]:
    if len({A.block_dim for A in ops}) > 1:
        raise InputError("block_dim mismatch")
    p = max(len(A.prefix) for A in ops)
    c = math.lcm(*(len(A.cycle) for A in ops))
    return [A.unrolled(p, c) for A in ops]


_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "compose": lambda a, b: a @ b,
}


def block_algebra(A: BlockOp, B: BlockOp, op: str) -> BlockOp:
    """Blockwise ``add``, ``sub`` or ``compose`` (``A @ B``)."""
    if op not in _BINARY:
        raise InputError(f"unknown block operation {op!r}")
    f = _BINARY[op]
    A, B = align(A, B)
    return BlockOp(
        [f(a, b) for a, b in zip(A.prefix, B.prefix)],
        [f(a, b) for a, b in zip(A.cycle, B.cycle)],
        A.block_dim,
    )


def adjoint(A: BlockOp) -> BlockOp:
    return A.adjoint()


def scale(A: BlockOp, s: complex) -> BlockOp:
    return A.map(lambda b: s * b)


def bop_norm(A: BlockOp) -> float:
    """Operator norm: sup over all blocks."""
    return max(op_norm(b) for b in A.blocks())


def calkin_norm(A: BlockOp) -> float:
    """Essential norm: the largest cycle-block norm (limsup of block norms)."""
    return max(op_norm(b) for b in A.cycle)


def tail_norm(A: BlockOp, start: int) -> float:
    """Norm of ``A`` restricted to the blocks with index >= ``start``.

    These restrictions run over finite-codimension subspaces; their infimum
    over ``start`` is the Calkin norm and is attained once ``start`` passes
    the prefix.
    """
    p = len(A.prefix)
    norms = [op_norm(b) for b in A.prefix[start:]] if start < p else []
    norms.extend(op_norm(b) for b in A.cycle)
    return max(norms)


def is_finite_rank(A: BlockOp, tol: Tolerance = DEFAULT_TOL) -> bool:
    return all(op_norm(b) <= tol.proj_tol for b in A.cycle)


def truncate(A: BlockOp, n_blocks: int) -> np.ndarray:
    """Dense block-diagonal matrix of the first ``n_blocks`` blocks."""
    if n_blocks < 1:
        raise InputError("n_blocks must be >= 1")
    return scipy.linalg.block_diag(*(A.block(i) for i in range(n_blocks)))


def is_block_projection(A: BlockOp, tol: Tolerance = DEFAULT_TOL) -> bool:
    return all(is_projection(b, tol) for b in A.blocks())


def check_projection(A: BlockOp, tol: Tolerance = DEFAULT_TOL, name: str = "operator") -> BlockOp:
    if not isinstance(A, BlockOp):
        raise InputError(f"{name} must be a BlockOp, got {type(A).__name__}")
    if not is_block_projection(A, tol):
        raise InputError(f"{name} is not a block projection")
    return A


class Status(str, Enum):
    FREDHOLM = "fredholm"
    NOT_FREDHOLM = "not_fredholm"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class PairDecision:
    """Outcome of the ``||P - P'||_C < 1`` test.

    ``calkin_gap`` is ``1 - ||P - P'||_C``; ``index`` is set iff the pair is Fredholm.
    """

    status: Status
    calkin_gap: float
    index: int | None = None

    def __post_init__(self):
        if (self.index is not None) != (self.status is Status.FREDHOLM):
            raise InputError("index must be present exactly when the pair is Fredholm")

    @property
    def fredholm(self) -> bool:
        return self.status is Status.FREDHOLM


def _block_rank(b: np.ndarray, tol: Tolerance) -> int:
    return rank_of(b, tol, scale=1.0)


def pair_fredholm(P: BlockOp, P2: BlockOp, tol: Tolerance = DEFAULT_TOL) -> PairDecision:
    """Decide whether ``(P, P2)`` is a Fredholm pair and compute its index.

    Index convention: ``ind(P, P2)`` is the index of ``x -> Px`` from Ran(P2)
    to Ran(P), so that on finite-rank differences it equals
    ``trace(P2 - P)``; blockwise this is the prefix sum of
    ``rank(P2_i) - rank(P_i)``.
    """
    check_projection(P, tol, "P")
    check_projection(P2, tol, "P'")
    A, B = align(P, P2)
    c = calkin_norm(A - B)
    gap = float(np.clip(1.0 - c, -1.0, 1.0))
    if c >= 1.0 + tol.proj_tol:
        return PairDecision(Status.NOT_FREDHOLM, gap)
    if c > 1.0 - tol.proj_tol:
        return PairDecision(Status.MARGINAL, gap)
    for j, (a, b) in enumerate(zip(A.cycle, B.cycle)):
        ra, rb = _block_rank(a, tol), _block_rank(b, tol)
        if ra != rb:
            raise NumericalInstabilityError(
                "cycle blocks at Calkin distance < 1 have unequal ranks",
                cycle_position=j, rank_p=ra, rank_p2=rb, calkin_distance=c,
            )
    index = sum(_block_rank(b, tol) - _block_rank(a, tol) for a, b in zip(A.prefix, B.prefix))
    return PairDecision(Status.FREDHOLM, gap, int(index))


def pair_index_oracle(P: BlockOp, P2: BlockOp, n_blocks: int, tol: Tolerance = DEFAULT_TOL) -> int:
    """Index of ``(P, P2)`` from dense truncations.

    Runs :func:`~fredpairs.linalg.pair_index_finite` on the first
    ``n_blocks`` blocks and again one full cycle later; the two values must agree.
    """
    A, B = align(P, P2)
    decision = pair_fredholm(A, B, tol)
    if not decision.fredholm:
        raise NotFredholmError(f"pair is {decision.status.value}, index undefined")
    p, c = A.shape
    if n_blocks < p + 2 * c:
        raise PreconditionError(f"n_blocks={n_blocks} < prefix + 2*cycle = {p + 2 * c}")
    values = []
    for n in (n_blocks, n_blocks + c):
        # ind(P, P2) is the index of x -> Px on Ran(P2)
        values.append(pair_index_finite(truncate(B, n), truncate(A, n), tol).index)
    if values[0] != values[1]:
        raise NumericalInstabilityError(
            "truncated index did not stabilize", n_blocks=n_blocks, values=values
        )
    return values[0]


def index_by_trace(P: BlockOp, P2: BlockOp, tol: Tolerance = DEFAULT_TOL) -> int:
    """Index of a pair with finite-rank difference as ``trace(P2 - P)``."""
    check_projection(P, tol, "P")
    check_projection(P2, tol, "P'")
    D = P2 - P
    if not is_finite_rank(D, tol):
        raise PreconditionError("index_by_trace needs a finite-rank difference")
    total = sum(np.trace(b) for b in D.prefix)
    total += sum(np.trace(b) for b in D.cycle)
    k = int(round(total.real))
    if abs(total - k) > tol.eig_tol * max(1, len(D.prefix) + len(D.cycle)):
        raise NumericalInstabilityError("trace of the difference is not an integer", trace=complex(total))
    return k
