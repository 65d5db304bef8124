"""Projection geometry: lines in C^2, principal angles, graph projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockOp, align, calkin_norm, check_projection
from .errors import InputError, NumericalInstabilityError
from .linalg import DEFAULT_TOL, Tolerance, as_dense, is_projection, op_norm, range_basis

__all__ = [
    "proj_line2",
    "line_at_angle",
    "diff_norm_2d",
    "principal_angle_sines",
    "GraphBC",
    "graph_block",
    "graph_projection",
    "graphest_bound",
]


def proj_line2(a: float, b: float) -> np.ndarray:
    """Orthogonal projection in C^2 onto span{(a, b)}."""
    v = np.array([a, b], dtype=complex)
    n2 = float(np.vdot(v, v).real)
    if n2 == 0.0:
        raise InputError("proj_line2 needs a nonzero vector")
    return np.outer(v, v.conj()) / n2


def line_at_angle(theta: float) -> np.ndarray:
    """Projection onto the real line through angle ``theta`` measured from e1."""
    return proj_line2(np.cos(theta), np.sin(theta))


def diff_norm_2d(a: float, b: float) -> float:
    """``||p - q||`` for p onto span{(a,b)}, q onto C x 0: the sine of the angle."""
    if a == 0 and b == 0:
        raise InputError("diff_norm_2d needs a nonzero vector")
    return abs(b) / np.hypot(a, b)


def principal_angle_sines(P, Q, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Sines of the principal angles between Ran(P) and Ran(Q), ascending.

    There are ``min(rank P, rank Q)`` angles. Cosines are the singular values
    of the cross-Gram matrix of orthonormal range bases; the sines are taken
    from the component of the smaller basis orthogonal to the larger range,
    which keeps small angles accurate.
    """
    A, B = as_dense(P, square=True), as_dense(Q, square=True)
    if A.shape != B.shape:
        raise InputError("projections act on different spaces")
    U, V = range_basis(A, tol), range_basis(B, tol)
    if U.shape[1] > V.shape[1]:
        U, V = V, U
    k = U.shape[1]
    if k == 0:
        return np.zeros(0)
    cos = np.clip(np.linalg.svd(V.conj().T @ U, compute_uv=False), 0.0, 1.0)
    resid = U - V @ (V.conj().T @ U)
    sin = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)
    # both routes must describe the same angles
    if np.max(np.abs(np.sort(sin) - np.sort(np.sqrt(1.0 - cos**2)))) > 1e-6:
        raise NumericalInstabilityError("principal angle routes disagree")
    return np.sort(sin)


@dataclass(frozen=True)
class GraphBC:
    """Graph-type boundary condition: base splitting S plus a map G from Ran(S) to Ker(S).

    ``G`` is stored as a block operator on the full space with
    ``G = (1 - S) G S`` blockwise.
    """

    base: BlockOp
    G: BlockOp

    def __init__(self, base: BlockOp, G: BlockOp, tol: Tolerance = DEFAULT_TOL):
        check_projection(base, tol, "base")
        S, G = align(base, G)
        for s, g in zip(S.blocks(), G.blocks()):
            comp = np.eye(S.block_dim) - s
            err = op_norm(comp @ g @ s - g)
            if err > tol.proj_tol * max(1.0, op_norm(g)) * 10:
                raise InputError(f"G does not map Ran(S) into Ker(S) (defect {err:.3e})")
        object.__setattr__(self, "base", S)
        object.__setattr__(self, "G", G)

    @classmethod
    def from_scalars(cls, base: BlockOp, direction: BlockOp, tol: Tolerance = DEFAULT_TOL) -> "GraphBC":
        """Build G as ``(1 - S) X S`` for an arbitrary block operator X."""
        S, X = align(base, direction)
        G = S.complement() @ X @ S
        return cls(S, G, tol)

    def scaled(self, s: float) -> "GraphBC":
        return GraphBC(self.base, s * self.G)


def graph_block(s: np.ndarray, g: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Projection onto {y + g y : y in Ran(s)} for one block.

    In an orthonormal basis adapted to Ran(s) + Ker(s), with ``h`` the matrix
    of ``g`` from Ran(s) to Ker(s) and ``C = (1 + h* h)^-1``, the projection is
    ``[[C, C h*], [h C, h C h*]]``.
    """
    d = s.shape[0]
    UY = range_basis(s, tol)
    UZ = range_basis(np.eye(d) - s, tol)
    h = UZ.conj().T @ g @ UY
    r = UY.shape[1]
    C = np.linalg.inv(np.eye(r) + h.conj().T @ h)
    top = np.hstack([C, C @ h.conj().T])
    bottom = np.hstack([h @ C, h @ C @ h.conj().T])
    U = np.hstack([UY, UZ])
    P = U @ np.vstack([top, bottom]) @ U.conj().T
    return (P + P.conj().T) / 2


def graph_projection(bc: GraphBC, tol: Tolerance = DEFAULT_TOL) -> BlockOp:
    S, G = bc.base, bc.G
    P = BlockOp(
        [graph_block(s, g, tol) for s, g in zip(S.prefix, G.prefix)],
        [graph_block(s, g, tol) for s, g in zip(S.cycle, G.cycle)],
        S.block_dim,
    )
    for b in P.blocks():
        if not is_projection(b, tol):
            raise NumericalInstabilityError("graph projection block failed projection axioms")
    return P


def graphest_bound(bc: GraphBC) -> float:
    """``g / sqrt(1 + g^2)`` with ``g = ||G||_C``: an upper bound for ``||P - S||_C``."""
    g = calkin_norm(bc.G)
    return g / np.sqrt(1.0 + g * g)
