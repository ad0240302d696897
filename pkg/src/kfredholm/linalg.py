"""Dense complex linear-algebra primitives.

Everything here is a pure function of its inputs.  Decompositions are LAPACK
calls through numpy (``eigh``, ``svd``) so results are deterministic for
identical input on a given platform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, DomainError, InvalidInput, NotHermitian

MACHEPS = np.finfo(float).eps
TOL_HERM = 1e-10


def as_matrix(M, name="M", allow_empty=False) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {A.shape}")
    if not allow_empty and (A.shape[0] < 1 or A.shape[1] < 1):
        raise InvalidInput(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def frozen(A: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``A``."""
    B = np.array(A, dtype=np.complex128, copy=True)
    B.setflags(write=False)
    return B


def hermitian_defect(M: np.ndarray) -> float:
    """Relative Frobenius distance ||M - M*|| / ||M|| (0 for the zero matrix)."""
    scale = np.linalg.norm(M)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(M - M.conj().T) / scale)


def hermitian_eig(M, tol_herm: float = TOL_HERM):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray of float, ascending
    U : unitary ndarray with ``M = U diag(w) U*``

    Raises
    ------
    DimensionMismatch
        If ``M`` is not square.
    NotHermitian
        If ``||M - M*||_F > tol_herm ||M||_F``.
    """
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {A.shape}")
    defect = hermitian_defect(A)
    if defect > tol_herm:
        raise NotHermitian(f"relative Hermitian defect {defect:.3e} > {tol_herm:.1e}")
    w, U = np.linalg.eigh(0.5 * (A + A.conj().T))
    return w, U


def svd(M):
    """Thin SVD ``M = U diag(sigma) V*`` with ``sigma`` nonincreasing.

    Note the third factor is ``V``, not ``V*``.
    """
    A = as_matrix(M)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return U, s, Vh.conj().T


def hermitian_function(M, f: Callable, domain: Callable | None = None, tol_herm: float = TOL_HERM):
    """Apply a scalar function to a Hermitian matrix through its eigenvalues.

    ``domain`` is an optional predicate on the eigenvalue array; any eigenvalue
    for which it is false raises :class:`DomainError`.  Non-finite values of
    ``f`` raise the same error.
    """
    w, U = hermitian_eig(M, tol_herm)
    if domain is not None:
        ok = np.asarray(domain(w), dtype=bool)
        if not ok.all():
            raise DomainError(f"eigenvalue(s) {w[~ok]} outside the domain of f")
    with np.errstate(divide="ignore", invalid="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape:
        fw = np.broadcast_to(fw, w.shape)
    if not np.all(np.isfinite(fw)):
        raise DomainError(f"f is not finite at eigenvalue(s) {w[~np.isfinite(fw)]}")
    R = (U * fw) @ U.conj().T
    if np.isrealobj(fw):
        R = 0.5 * (R + R.conj().T)
    return R


def above(tol: float) -> Callable:
    """Domain predicate ``x > tol``."""
    return lambda x: x > tol


def inv_sqrt_one_plus(x):
    """x -> (1 + x)^(-1/2), the scalar behind Q_t."""
    return 1.0 / np.sqrt(1.0 + x)


def default_rank_tol(shape, sigma_max: float) -> float:
    return max(shape) * MACHEPS * sigma_max


@dataclass(frozen=True)
class RankDecision:
    rank: int
    sigma: np.ndarray
    tol_used: float
    gap_ratio: float


def numerical_rank(M, tol_rank: float = 0.0) -> RankDecision:
    """Count singular values strictly above the tolerance.

    ``tol_rank = 0`` selects ``max(rows, cols) * eps * sigma_max``.
    ``gap_ratio`` is ``sigma[rank-1] / sigma[rank]`` (inf when nothing was
    dropped or the first dropped value is exactly zero, 0 when rank is 0).
    """
    if tol_rank < 0:
        raise ValueError("tol_rank must be nonnegative")
    A = as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    smax = s[0] if s.size else 0.0
    tol = tol_rank if tol_rank > 0 else default_rank_tol(A.shape, smax)
    rank = int(np.count_nonzero(s > tol))
    if rank == 0:
        gap = 0.0
    elif rank == s.size or s[rank] == 0.0:
        gap = float("inf")
    else:
        gap = float(s[rank - 1] / s[rank])
    s.setflags(write=False)
    return RankDecision(rank=rank, sigma=s, tol_used=float(tol), gap_ratio=gap)


def kernel_basis(M, tol_rank: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``M``."""
    A = as_matrix(M)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    tol = tol_rank if tol_rank > 0 else default_rank_tol(A.shape, smax)
    rank = int(np.count_nonzero(s > tol))
    return Vh[rank:].conj().T


def range_basis(M, tol_rank: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical column space of ``M``."""
    A = as_matrix(M)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    tol = tol_rank if tol_rank > 0 else default_rank_tol(A.shape, smax)
    rank = int(np.count_nonzero(s > tol))
    return U[:, :rank]


def pinv(M, tol_rank: float = 0.0) -> np.ndarray:
    """Moore-Penrose inverse, dropping singular values at or below the tolerance."""
    A = as_matrix(M)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    tol = tol_rank if tol_rank > 0 else default_rank_tol(A.shape, smax)
    keep = s > tol
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def pad_rows(A: np.ndarray, rows: int) -> np.ndarray:
    """Zero-pad the columns of ``A`` to ``rows`` entries (embedding C^k into C^rows)."""
    if A.shape[0] > rows:
        raise DimensionMismatch(f"cannot pad {A.shape[0]} rows down to {rows}")
    out = np.zeros((rows, A.shape[1]), dtype=np.complex128)
    out[: A.shape[0]] = A
    return out


def containment_residual(A: np.ndarray, B: np.ndarray) -> float:
    """How far span(A) is from lying inside span(B).

    Both arguments hold orthonormal columns; shorter column vectors are
    zero-padded to the common length.  Returns ``||A - B B* A||_2`` (0 when
    ``A`` has no columns, 1 when ``A`` is nonempty and ``B`` is empty).
    """
    n = max(A.shape[0], B.shape[0])
    A = pad_rows(A, n)
    B = pad_rows(B, n)
    if A.shape[1] == 0:
        return 0.0
    R = A - B @ (B.conj().T @ A)
    return float(np.linalg.norm(R, 2))


def mutual_containment(A: np.ndarray, B: np.ndarray) -> float:
    """Max of the two one-sided containment residuals: 0 iff the spans coincide."""
    return max(containment_residual(A, B), containment_residual(B, A))


def opnorm(M) -> float:
    A = np.asarray(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))
