"""Paths of projections.

``w_path`` is the explicit path between two projections at distance < 1,
built from the symmetries ``F(P) = 1 - 2P``::

    Y(t) = F(P0) cos(pi t / 2) + F(P1) sin(pi t / 2)
    X(t) = Y(t)^2 = 1 + (F(P0) F(P1) + F(P1) F(P0)) sin cos
    W(t) = F^-1( X(t)^(-1/2) Y(t) )

``p_path`` first splits off the extreme eigenspaces of ``P0 - P1`` so that
the same construction applies to any Fredholm pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockOp, align, calkin_norm, check_projection, pair_fredholm
from .errors import InputError, NotFredholmError, NumericalInstabilityError, PreconditionError
from .linalg import DEFAULT_TOL, Tolerance, as_dense, eigenspace_at, is_projection, op_norm, projection_defect

__all__ = [
    "involution",
    "involution_inverse",
    "w_path",
    "ExtremeSplit",
    "split_extreme",
    "PathSample",
    "p_path",
]

# hermitization may remove at most this much asymmetry before it counts as an error
_HERMITIZE_LIMIT = 1e-8


def involution(P, tol: Tolerance = DEFAULT_TOL):
    """``1 - 2P``, a self-adjoint unitary."""
    if isinstance(P, BlockOp):
        check_projection(P, tol, "P")
        return BlockOp.identity(P.block_dim) - 2 * P
    A = as_dense(P, square=True)
    if not is_projection(A, tol):
        raise InputError("involution needs a projection")
    return np.eye(A.shape[0]) - 2 * A


def involution_inverse(Y):
    """``(1 - Y) / 2``."""
    if isinstance(Y, BlockOp):
        return 0.5 * (BlockOp.identity(Y.block_dim) - Y)
    A = as_dense(Y, square=True)
    return (np.eye(A.shape[0]) - A) / 2


def _inv_sqrt_hermitian(X: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh((X + X.conj().T) / 2)
    if w.size and w.min() <= 0.0:
        raise NumericalInstabilityError("X(t) has a non-positive eigenvalue", min_eigenvalue=float(w.min()))
    return (V * w**-0.5) @ V.conj().T


def _w_dense(P0: np.ndarray, P1: np.ndarray, t: float) -> np.ndarray:
    n = P0.shape[0]
    if n == 0:
        return P0.copy()
    I = np.eye(n)
    F0, F1 = I - 2 * P0, I - 2 * P1
    c, s = np.cos(np.pi * t / 2), np.sin(np.pi * t / 2)
    Y = c * F0 + s * F1
    X = I + (F0 @ F1 + F1 @ F0) * (s * c)
    W = (I - _inv_sqrt_hermitian(X) @ Y) / 2
    asym = op_norm(W - W.conj().T)
    if asym > _HERMITIZE_LIMIT:
        raise NumericalInstabilityError("W(t) is not self-adjoint", asymmetry=asym, t=t)
    return (W + W.conj().T) / 2


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InputError(f"t must lie in [0, 1], got {t}")
    return t


def w_path(P0, P1, t: float, tol: Tolerance = DEFAULT_TOL):
    """Evaluate ``W(P0, P1)(t)``; requires ``||P1 - P0|| < 1``.

    Block operators are handled blockwise (the formula commutes with direct sums).
    """
    t = _check_t(t)
    if isinstance(P0, BlockOp):
        check_projection(P0, tol, "P0")
        check_projection(P1, tol, "P1")
        A, B = align(P0, P1)
        dist = max(op_norm(a - b) for a, b in zip(A.blocks(), B.blocks()))
        if dist >= 1.0 - tol.proj_tol:
            raise PreconditionError(f"||P1 - P0|| = {dist} is not < 1")
        return BlockOp(
            [_w_dense(a, b, t) for a, b in zip(A.prefix, B.prefix)],
            [_w_dense(a, b, t) for a, b in zip(A.cycle, B.cycle)],
            A.block_dim,
        )
    A, B = as_dense(P0, square=True), as_dense(P1, square=True)
    if not (is_projection(A, tol) and is_projection(B, tol)):
        raise InputError("w_path needs projections")
    dist = op_norm(B - A)
    if dist >= 1.0 - tol.proj_tol:
        raise PreconditionError(f"||P1 - P0|| = {dist} is not < 1")
    return _w_dense(A, B, t)


@dataclass(frozen=True)
class ExtremeSplit:
    """Orthonormal bases (columns) of Ran(P0) & Ker(P1), Ker(P0) & Ran(P1), and the rest."""

    V0: np.ndarray
    V1: np.ndarray
    Vp: np.ndarray


def _split_dense(P0: np.ndarray, P1: np.ndarray, tol: Tolerance) -> ExtremeSplit:
    D = P0 - P1
    V0 = eigenspace_at(D, 1.0, tol)
    V1 = eigenspace_at(D, -1.0, tol)
    n = D.shape[0]
    E = np.hstack([V0, V1])
    if E.shape[1] == n:
        Vp = np.zeros((n, 0), dtype=complex)
    elif E.shape[1] == 0:
        Vp = np.eye(n, dtype=complex)
    else:
        # orthogonal complement of span(E)
        U, _, _ = np.linalg.svd(E, full_matrices=True)
        Vp = U[:, E.shape[1]:]
    return ExtremeSplit(V0, V1, Vp)


def split_extreme(P0, P1, tol: Tolerance = DEFAULT_TOL):
    """Split off the +1 and -1 eigenspaces of ``P0 - P1``.

    For block operators the result is a list of :class:`ExtremeSplit`, one per
    prefix block; cycle blocks must have no extreme eigenvalues (otherwise the
    pair is not Fredholm).
    """
    if isinstance(P0, BlockOp):
        check_projection(P0, tol, "P0")
        check_projection(P1, tol, "P1")
        A, B = align(P0, P1)
        for j, (a, b) in enumerate(zip(A.cycle, B.cycle)):
            s = _split_dense(a, b, tol)
            if s.V0.shape[1] or s.V1.shape[1]:
                raise NotFredholmError(f"cycle block {j} has eigenvalue +-1 in P0 - P1")
        return [_split_dense(a, b, tol) for a, b in zip(A.prefix, B.prefix)]
    A, B = as_dense(P0, square=True), as_dense(P1, square=True)
    if not (is_projection(A, tol) and is_projection(B, tol)):
        raise InputError("split_extreme needs projections")
    return _split_dense(A, B, tol)


@dataclass(frozen=True)
class PathSample:
    t: float
    projection: object
    norm_to_start: float
    calkin_to_start: float | None = None


def _p_dense(P0: np.ndarray, P1: np.ndarray, t: float, split: ExtremeSplit) -> np.ndarray:
    Vp = split.Vp
    p0 = Vp.conj().T @ P0 @ Vp
    p1 = Vp.conj().T @ P1 @ Vp
    W = _w_dense(p0, p1, t)
    out = Vp @ W @ Vp.conj().T + split.V1 @ split.V1.conj().T
    return (out + out.conj().T) / 2


def p_path(P0, P1, t: float, tol: Tolerance = DEFAULT_TOL) -> PathSample:
    """Sample the path ``P(t) = W(P0|V', P1|V')(t) + 0 on V0 + 1 on V1``.

    ``P(1) = P1`` and ``P(0) - P0`` is finite rank. For block operators the
    sample also records ``||P(t) - P0||_C``.
    """
    t = _check_t(t)
    if isinstance(P0, BlockOp):
        splits = split_extreme(P0, P1, tol)
        A, B = align(P0, P1)
        if pair_fredholm(A, B, tol).status.value != "fredholm":
            raise NotFredholmError("p_path needs a Fredholm pair")
        Pt = BlockOp(
            [_p_dense(a, b, t, s) for a, b, s in zip(A.prefix, B.prefix, splits)],
            [_w_dense(a, b, t) for a, b in zip(A.cycle, B.cycle)],
            A.block_dim,
        )
        for blk in Pt.blocks():
            if projection_defect(blk) > _HERMITIZE_LIMIT:
                raise NumericalInstabilityError("path sample is not a projection", t=t)
        diff = Pt - A
        return PathSample(
            t, Pt,
            norm_to_start=max(op_norm(b) for b in diff.blocks()),
            calkin_to_start=calkin_norm(diff),
        )
    A, B = as_dense(P0, square=True), as_dense(P1, square=True)
    split = split_extreme(A, B, tol)
    Pt = _p_dense(A, B, t, split)
    if projection_defect(Pt) > _HERMITIZE_LIMIT:
        raise NumericalInstabilityError("path sample is not a projection", t=t)
    return PathSample(t, Pt, norm_to_start=op_norm(Pt - A))
