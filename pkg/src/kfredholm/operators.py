"""Adjointable operators on E = d x m matrices.

Every adjointable T is right multiplication ``T(x) = x R`` by an m x m matrix,
so K-linearity ``T(a x) = a T(x)`` holds by associativity and the adjoint is
the multiplier ``R*``.  Composition reverses the multipliers:
``(T S)(x) = x R_S R_T``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidInput
from .module import (
    CompactElement,
    ModuleVector,
    inner_product,
    lift,
    localize,
    matrix_from_json,
    matrix_to_json,
    module_action,
    orthonormal_basis,
    projection_vector,
    standard_basepoint,
)


@dataclass(frozen=True, eq=False)
class AdjointableOp:
    dim_h: int
    dim_m: int
    right_mult: np.ndarray

    def __post_init__(self):
        R = linalg.as_matrix(self.right_mult, "right_mult")
        if R.shape != (self.dim_m, self.dim_m):
            raise DimensionMismatch(f"right multiplier must be {self.dim_m}x{self.dim_m}, got {R.shape}")
        if self.dim_h < 1:
            raise InvalidInput("dim_h must be positive")
        object.__setattr__(self, "right_mult", linalg.frozen(R))

    @classmethod
    def identity(cls, d, m):
        return cls(d, m, np.eye(m))

    @classmethod
    def zero(cls, d, m):
        return cls(d, m, np.zeros((m, m)))

    @classmethod
    def from_coordinates(cls, M, d=1):
        """Operator whose localization Psi(T) is the m x m matrix ``M``."""
        M = linalg.as_matrix(M)
        return cls(d, M.shape[0], M.T)

    @property
    def coordinates(self) -> np.ndarray:
        """The matrix of T acting on localized coordinates (column convention)."""
        return self.right_mult.T

    def __call__(self, x: ModuleVector) -> ModuleVector:
        return apply(self, x)

    def _check(self, other):
        if (self.dim_h, self.dim_m) != (other.dim_h, other.dim_m):
            raise DimensionMismatch(f"operators act on different modules: {(self.dim_h, self.dim_m)} vs {(other.dim_h, other.dim_m)}")

    def __matmul__(self, other):
        """Composition ``self o other``."""
        self._check(other)
        return AdjointableOp(self.dim_h, self.dim_m, other.right_mult @ self.right_mult)

    def __add__(self, other):
        self._check(other)
        return AdjointableOp(self.dim_h, self.dim_m, self.right_mult + other.right_mult)

    def __sub__(self, other):
        self._check(other)
        return AdjointableOp(self.dim_h, self.dim_m, self.right_mult - other.right_mult)

    def __mul__(self, scalar):
        return AdjointableOp(self.dim_h, self.dim_m, self.right_mult * complex(scalar))

    __rmul__ = __mul__

    @property
    def H(self):
        return adjoint(self)

    def norm(self) -> float:
        return linalg.opnorm(self.right_mult)

    def to_json(self):
        return {"d": self.dim_h, "m": self.dim_m, "right_mult": matrix_to_json(self.right_mult)}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(int(obj["d"]), int(obj["m"]), matrix_from_json(obj["right_mult"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed operator JSON: {exc}") from exc


def apply(T: AdjointableOp, x: ModuleVector) -> ModuleVector:
    if x.shape != (T.dim_h, T.dim_m):
        raise DimensionMismatch(f"operator on {(T.dim_h, T.dim_m)} applied to vector of shape {x.shape}")
    return ModuleVector(x.matrix @ T.right_mult)


def adjoint(T: AdjointableOp) -> AdjointableOp:
    return AdjointableOp(T.dim_h, T.dim_m, T.right_mult.conj().T)


def theta(x: ModuleVector, y: ModuleVector) -> AdjointableOp:
    """The rank-one operator ``z -> <z, x> y``; its multiplier is ``x* y``."""
    if x.shape != y.shape:
        raise DimensionMismatch(f"theta needs equal shapes, got {x.shape} and {y.shape}")
    return AdjointableOp(x.dim_h, x.dim_m, x.matrix.conj().T @ y.matrix)


@dataclass(frozen=True)
class ThetaSpanCertificate:
    pairs: tuple
    coefficients: tuple
    residual: float

    def operator(self, d, m) -> AdjointableOp:
        R = np.zeros((m, m), dtype=np.complex128)
        for (x, y), c in zip(self.pairs, self.coefficients):
            R += c * theta(x, y).right_mult
        return AdjointableOp(d, m, R)


def theta_span_membership(T: AdjointableOp, tol: float = 1e-12) -> ThetaSpanCertificate:
    """Write T as a combination of at most m rank-one operators.

    Uses the SVD ``Psi(T) = sum_k s_k p_k q_k*`` and the identity
    ``Psi(Theta(lift q, lift p)) = p q*``.  Singular values at or below the
    default rank tolerance are dropped; ``residual`` is the operator-norm
    error of the certified combination, which must not exceed ``tol``.
    """
    e0 = standard_basepoint(T.dim_h)
    M = T.coordinates
    if not np.any(M):
        return ThetaSpanCertificate((), (), 0.0)
    U, s, V = linalg.svd(M)
    keep = s > linalg.default_rank_tol(M.shape, s[0])
    pairs = tuple((lift(e0, V[:, k]), lift(e0, U[:, k])) for k in np.flatnonzero(keep))
    coeffs = tuple(complex(c) for c in s[keep])
    cert = ThetaSpanCertificate(pairs, coeffs, 0.0)
    residual = linalg.opnorm(cert.operator(T.dim_h, T.dim_m).right_mult - T.right_mult)
    if residual > tol:
        raise ArithmeticError(f"theta-span reconstruction residual {residual:.3e} exceeds {tol:.1e}")
    return ThetaSpanCertificate(pairs, coeffs, residual)


def psi(T: AdjointableOp, e0: CompactElement | None = None) -> np.ndarray:
    """Localization ``Psi(T) = T|_{E_e0}`` as an m x m matrix.

    Column j is the localized image of the lifted j-th basis vector of E_e0.
    """
    if e0 is None:
        e0 = standard_basepoint(T.dim_h)
    if e0.dim_h != T.dim_h:
        raise DimensionMismatch("basepoint and operator live over different truncations")
    projection_vector(e0)
    cols = []
    for j in range(T.dim_m):
        xj = lift(e0, np.eye(T.dim_m)[j])
        cols.append(localize(e0, apply(T, xj)).coords)
    return np.column_stack(cols)


def psi_inverse(S, e0: CompactElement, dim_h: int | None = None) -> AdjointableOp:
    """Rebuild T from ``Psi(T) = S`` as ``sum_ij S_ij Theta(b_j, b_i)``."""
    S = linalg.as_matrix(S, "S")
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"Psi(T) must be square, got {S.shape}")
    d = e0.dim_h if dim_h is None else dim_h
    if d != e0.dim_h:
        raise DimensionMismatch("dim_h disagrees with the basepoint")
    u = projection_vector(e0)
    m = S.shape[0]
    b = [ModuleVector(np.outer(u, np.eye(m)[j])) for j in range(m)]
    R = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            if S[i, j] != 0:
                R += S[i, j] * theta(b[j], b[i]).right_mult
    return AdjointableOp(d, m, R)


def _vectorized(T: AdjointableOp) -> np.ndarray:
    """Matrix of x -> x R on vec(x) (row-major flattening of the d x m matrix)."""
    return np.kron(np.eye(T.dim_h), T.right_mult.T)


def _localized_span(vectors, e0, d, m, tol_rank):
    """Orthonormal basis of ``e0 V`` in coordinates, given flattened module vectors."""
    if vectors.shape[1] == 0:
        return np.zeros((m, 0), dtype=np.complex128)
    coords = np.column_stack([
        localize(e0, ModuleVector(vectors[:, k].reshape(d, m))).coords for k in range(vectors.shape[1])
    ])
    return linalg.range_basis(coords, tol_rank) if np.any(coords) else np.zeros((m, 0), dtype=np.complex128)


@dataclass(frozen=True)
class TransferCheck:
    ker_check: float
    ran_check: float
    ker_dim_psi: int
    ker_dim_module: int
    ran_dim_psi: int
    ran_dim_module: int


def kernel_range_transfer(T: AdjointableOp, e: CompactElement | None = None, tol_rank: float = 0.0) -> TransferCheck:
    """Check ``Ker Psi(T) = e Ker T`` and ``Ran Psi(T) = e Ran T``.

    The module side treats T as a linear map on all d*m entries of x, takes
    kernel and range there, and only then localizes at ``e``; the other side
    works on the m x m matrix ``Psi(T)``.  Residuals are mutual containment
    distances between the two subspaces of C^m.
    """
    if e is None:
        e = standard_basepoint(T.dim_h)
    projection_vector(e)
    d, m = T.dim_h, T.dim_m
    P = psi(T, e)
    ker_psi = linalg.kernel_basis(P, tol_rank)
    ran_psi = linalg.range_basis(P, tol_rank)
    L = _vectorized(T)
    ker_mod = _localized_span(linalg.kernel_basis(L, tol_rank), e, d, m, tol_rank)
    ran_mod = _localized_span(linalg.range_basis(L, tol_rank), e, d, m, tol_rank)
    return TransferCheck(
        ker_check=linalg.mutual_containment(ker_psi, ker_mod),
        ran_check=linalg.mutual_containment(ran_psi, ran_mod),
        ker_dim_psi=ker_psi.shape[1],
        ker_dim_module=ker_mod.shape[1],
        ran_dim_psi=ran_psi.shape[1],
        ran_dim_module=ran_mod.shape[1],
    )


def is_bounded_below(T: AdjointableOp, restrict_to_ker_perp: bool = True, tol: float = 0.0, tol_rank: float = 0.0):
    """Lower bound of ``||T x|| / ||x||`` on (Ker T)-perp (or on all of E).

    Returns ``(bound > tol, bound)``.  On an empty restriction domain the bound
    is +inf, so the zero operator counts as bounded below.
    """
    rank = linalg.numerical_rank(T.right_mult, tol_rank)
    s = rank.sigma
    if restrict_to_ker_perp:
        s = s[: rank.rank]
    bound = float(s[-1]) if s.size else float("inf")
    return bound > tol, bound


def module_linearity_defect(T: AdjointableOp, a: CompactElement, x: ModuleVector) -> float:
    """``||T(a x) - a T(x)||``; zero by construction of the representation."""
    return linalg.opnorm(apply(T, module_action(a, x)).matrix - module_action(a, apply(T, x)).matrix)


def adjoint_defect(T: AdjointableOp, xs, ys) -> float:
    """sup over test pairs of ``||<T x, y> - <x, T* y>||``."""
    Ts = adjoint(T)
    worst = 0.0
    for x in xs:
        for y in ys:
            lhs = inner_product(apply(T, x), y).matrix
            rhs = inner_product(x, apply(Ts, y)).matrix
            worst = max(worst, linalg.opnorm(lhs - rhs))
    return worst


def full_basis_identity_certificate(d, m) -> ThetaSpanCertificate:
    """Identity written as ``sum_j Theta(b_j, b_j)`` over the standard basis."""
    basis = orthonormal_basis(d, m)
    pairs = tuple((x, x) for x in basis)
    cert = ThetaSpanCertificate(pairs, (1.0,) * m, 0.0)
    res = linalg.opnorm(cert.operator(d, m).right_mult - np.eye(m))
    return ThetaSpanCertificate(pairs, (1.0,) * m, res)
