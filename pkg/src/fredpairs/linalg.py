"""Dense complex matrix kit.

Every finite computation in the package ends up here: SVD-based norms,
tolerance-aware ranks, orthonormal range bases and the finite-dimensional
index of a pair of projections.

Dense operators are plain complex ``numpy`` arrays; :func:`as_dense`
validates and converts anything array-like.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError, NumericalInstabilityError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_dense",
    "op_norm",
    "rank_of",
    "orth_basis",
    "range_basis",
    "orth_projector",
    "is_projection",
    "projection_defect",
    "restricted_map",
    "PairIndex",
    "pair_index_finite",
    "eigenspace_at",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical slack used throughout the package.

    rank_tol
        Relative singular-value cutoff for :func:`rank_of`.
    proj_tol
        Slack on the projection axioms and on the Fredholm decision band
        around Calkin distance 1.
    eig_tol
        Eigenvalue clustering slack (eigenspace extraction, integrality of traces).
    """

    rank_tol: float = 1e-9
    proj_tol: float = 1e-10
    eig_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "proj_tol", "eig_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and 0.0 < value < 1e-3):
                raise ConfigError(f"{name} must lie in (0, 1e-3), got {value!r}")

    @classmethod
    def unchecked(cls, rank_tol=1e-9, proj_tol=1e-10, eig_tol=1e-8) -> "Tolerance":
        """Build a tolerance without validation (deliberate misconfiguration only)."""
        tol = object.__new__(cls)
        object.__setattr__(tol, "rank_tol", float(rank_tol))
        object.__setattr__(tol, "proj_tol", float(proj_tol))
        object.__setattr__(tol, "eig_tol", float(eig_tol))
        return tol

    def is_sane(self) -> bool:
        return all(0.0 < v < 1e-3 for v in (self.rank_tol, self.proj_tol, self.eig_tol))


DEFAULT_TOL = Tolerance()


def as_dense(M, square: bool = False) -> np.ndarray:
    """Return ``M`` as a 2-D complex array, rejecting NaN/Inf entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise InputError(f"expected a matrix, got array of shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    if square and A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    return A


def _svals(A: np.ndarray) -> np.ndarray:
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def op_norm(M) -> float:
    """Operator norm (largest singular value); 0 for an empty matrix."""
    s = _svals(as_dense(M))
    return float(s[0]) if s.size else 0.0


def rank_of(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``rank_tol * scale``.

    ``scale`` defaults to the largest singular value of ``M``. Pass an explicit
    scale when the natural size of the entries is known in advance (e.g. 1 for
    compressions of projections), so that pure roundoff is not promoted to rank.
    """
    s = _svals(as_dense(M))
    if s.size == 0 or s[0] == 0.0:
        return 0
    ref = s[0] if scale is None else scale
    return int(np.count_nonzero(s > tol.rank_tol * ref))


def orth_basis(vectors, tol: Tolerance = DEFAULT_TOL, dim: int | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given vectors.

    ``vectors`` is a sequence of 1-D vectors or a matrix whose columns span
    the space. ``dim`` is required when the sequence is empty.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        A = as_dense(vectors)
    else:
        vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
        if not vecs:
            if dim is None:
                raise InputError("empty vector list needs an explicit dimension")
            return np.zeros((dim, 0), dtype=complex)
        sizes = {v.size for v in vecs}
        if len(sizes) != 1:
            raise InputError(f"vectors live in different dimensions: {sorted(sizes)}")
        A = as_dense(np.column_stack(vecs))
    if dim is not None and A.shape[0] != dim:
        raise InputError(f"vectors have dimension {A.shape[0]}, expected {dim}")
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = rank_of(A, tol)
    return U[:, :r]


def orth_projector(vectors, tol: Tolerance = DEFAULT_TOL, dim: int | None = None) -> np.ndarray:
    """Orthogonal projection onto the span of ``vectors``."""
    U = orth_basis(vectors, tol, dim)
    return U @ U.conj().T


def projection_defect(M) -> float:
    """``max(||M^2 - M||, ||M - M*||)``: how far ``M`` is from an orthogonal projection."""
    A = as_dense(M, square=True)
    return max(op_norm(A @ A - A), op_norm(A - A.conj().T))


def is_projection(M, tol: Tolerance = DEFAULT_TOL, slack: float | None = None) -> bool:
    A = as_dense(M, square=True)
    limit = tol.proj_tol if slack is None else slack
    return projection_defect(A) <= limit


def range_basis(P, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the range of a projection (eigenvectors with eigenvalue ~1)."""
    A = as_dense(P, square=True)
    if not is_projection(A, tol):
        raise InputError(f"not a projection (defect {projection_defect(A):.3e})")
    H = (A + A.conj().T) / 2
    w, V = np.linalg.eigh(H)
    return V[:, w > 0.5]


def restricted_map(P, Q, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Matrix of ``x -> Qx`` from Ran(P) to Ran(Q) in orthonormal bases.

    Shape is ``rank(Q) x rank(P)``.
    """
    A, B = as_dense(P, square=True), as_dense(Q, square=True)
    if A.shape != B.shape:
        raise InputError(f"projections act on different spaces: {A.shape} vs {B.shape}")
    UP, UQ = range_basis(A, tol), range_basis(B, tol)
    return UQ.conj().T @ UP


@dataclass(frozen=True)
class PairIndex:
    index: int
    dim_ker: int
    dim_coker: int


def pair_index_finite(P, Q, tol: Tolerance = DEFAULT_TOL) -> PairIndex:
    """Kernel/cokernel dimensions and index of ``x -> Qx : Ran(P) -> Ran(Q)``.

    In finite dimensions the index must equal ``rank(P) - rank(Q)``; the
    ranks used for that check come from traces, independently of the SVD of
    the compression.
    """
    M = restricted_map(P, Q, tol)
    rows, cols = M.shape
    # singular values of a compression of projections are cosines in [0, 1]
    r = rank_of(M, tol, scale=1.0)
    dim_ker, dim_coker = cols - r, rows - r
    index = dim_ker - dim_coker
    trace_rank_p = int(round(np.trace(as_dense(P)).real))
    trace_rank_q = int(round(np.trace(as_dense(Q)).real))
    if index != trace_rank_p - trace_rank_q:
        raise NumericalInstabilityError(
            "pair index disagrees with trace rank difference",
            index=index, dim_ker=dim_ker, dim_coker=dim_coker,
            rank_p=trace_rank_p, rank_q=trace_rank_q,
        )
    return PairIndex(index=index, dim_ker=dim_ker, dim_coker=dim_coker)


def eigenspace_at(M, lam: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the eigenspace of Hermitian ``M`` near ``lam``.

    Eigenvalues within ``eig_tol`` of ``lam`` are clustered together. Returns
    an ``n x 0`` array when there are none.
    """
    A = as_dense(M, square=True)
    if op_norm(A - A.conj().T) > tol.proj_tol * max(1.0, op_norm(A)):
        raise InputError("eigenspace_at needs a Hermitian matrix")
    w, V = np.linalg.eigh((A + A.conj().T) / 2)
    return V[:, np.abs(w - lam) <= tol.eig_tol]
