"""Hilbert K(H)-modules at finite truncation.

The concrete model is E = d x m complex matrices, with left action of the
coefficient algebra K = M_d(C) by matrix product and K-valued inner product
``<x, y> = x y*``.  A minimal projection ``e0 = u u*`` localizes E to the
Hilbert space ``e0 E``; its elements are ``u c`` for row vectors ``c`` in C^m,
so localized coordinates are just ``c = u* x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidInput, NotMinimalProjection

TOL_PROJ = 1e-10


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed complex matrix JSON: {exc}") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise InvalidInput(f"complex matrix JSON declares {rows}x{cols} but holds {re.shape}/{im.shape}")
    return linalg.as_matrix(re + 1j * im)


@dataclass(frozen=True, eq=False)
class CompactElement:
    """An element of K(H) compressed to the first d basis vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        A = linalg.as_matrix(self.matrix, "CompactElement")
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"CompactElement must be square, got {A.shape}")
        object.__setattr__(self, "matrix", linalg.frozen(A))

    @property
    def dim_h(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d))

    @classmethod
    def matrix_unit(cls, d, i=0, j=0):
        A = np.zeros((d, d))
        A[i, j] = 1.0
        return cls(A)

    def __matmul__(self, other):
        if isinstance(other, CompactElement):
            _same_d(self, other)
            return CompactElement(self.matrix @ other.matrix)
        return NotImplemented

    def adjoint(self):
        return CompactElement(self.matrix.conj().T)

    def to_json(self):
        return matrix_to_json(self.matrix)

    @classmethod
    def from_json(cls, obj):
        return cls(matrix_from_json(obj))


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """An element x of E, stored as a d x m matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.frozen(linalg.as_matrix(self.matrix, "ModuleVector")))

    @property
    def dim_h(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim_m(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    @classmethod
    def zeros(cls, d, m):
        return cls(np.zeros((d, m)))

    def __add__(self, other):
        _same_shape(self, other)
        return ModuleVector(self.matrix + other.matrix)

    def __sub__(self, other):
        _same_shape(self, other)
        return ModuleVector(self.matrix - other.matrix)

    def __mul__(self, scalar):
        return ModuleVector(self.matrix * complex(scalar))

    __rmul__ = __mul__

    def to_json(self):
        return matrix_to_json(self.matrix)

    @classmethod
    def from_json(cls, obj):
        return cls(matrix_from_json(obj))


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    vectors: tuple
    projections: tuple = field(default=())

    def __post_init__(self):
        vs = tuple(self.vectors)
        object.__setattr__(self, "vectors", vs)
        if not self.projections:
            object.__setattr__(self, "projections", tuple(inner_product(x, x) for x in vs))

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def coordinates(self) -> np.ndarray:
        """Rows ``r_j`` with ``x_j = u r_j`` for the shared unit vector u (k x m)."""
        if not self.vectors:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.vstack([_row_of_basic(x) for x in self.vectors])


@dataclass(frozen=True, eq=False)
class LocalizedVector:
    """``e0 x`` in the Hilbert space ``E_e0``, as coordinates in C^m."""

    basepoint: CompactElement
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.complex128).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def inner(self, other) -> complex:
        """Hilbert-space inner product, linear in the first argument."""
        return complex(np.vdot(other.coords, self.coords))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def lift(self) -> ModuleVector:
        u = projection_vector(self.basepoint)
        return ModuleVector(np.outer(u, self.coords))


def _same_d(a, b):
    if a.dim_h != b.dim_h:
        raise DimensionMismatch(f"Hilbert-space truncations differ: {a.dim_h} vs {b.dim_h}")


def _same_shape(x, y):
    if x.shape != y.shape:
        raise DimensionMismatch(f"module vectors differ in shape: {x.shape} vs {y.shape}")


def inner_product(x: ModuleVector, y: ModuleVector) -> CompactElement:
    """K-valued inner product ``<x, y> = x y*``."""
    _same_shape(x, y)
    return CompactElement(x.matrix @ y.matrix.conj().T)


def module_action(a: CompactElement, x: ModuleVector) -> ModuleVector:
    _same_d(a, x)
    return ModuleVector(a.matrix @ x.matrix)


def module_norm(x: ModuleVector) -> float:
    """``||<x,x>||^(1/2)``, i.e. the largest singular value of x."""
    return float(np.linalg.norm(x.matrix, 2))


def _projection_spectrum(A: np.ndarray):
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    return w


def is_minimal_projection(e: CompactElement, tol: float = TOL_PROJ) -> bool:
    """Hermitian, idempotent and rank one, each within ``tol``."""
    A = e.matrix
    scale = max(1.0, np.linalg.norm(A))
    if np.linalg.norm(A - A.conj().T) > tol * scale:
        return False
    if np.linalg.norm(A @ A - A) > tol * scale:
        return False
    w = _projection_spectrum(A)
    return abs(w[-1] - 1.0) <= tol and np.all(np.abs(w[:-1]) <= tol)


def projection_vector(e: CompactElement, tol: float = TOL_PROJ) -> np.ndarray:
    """Unit vector u with ``e = u u*``.

    The phase is fixed so that the entry of largest modulus is real and
    positive (first such entry on ties).
    """
    if not is_minimal_projection(e, tol):
        raise NotMinimalProjection("basepoint is not a rank-one orthogonal projection")
    _, U = np.linalg.eigh(0.5 * (e.matrix + e.matrix.conj().T))
    u = U[:, -1]
    k = int(np.argmax(np.abs(u)))
    return u * (abs(u[k]) / u[k])


def is_basic_vector(x: ModuleVector, tol: float = TOL_PROJ) -> bool:
    """True iff ``<x, x>`` is a minimal projection (eigenvalues 1 once, else 0)."""
    w = _projection_spectrum(inner_product(x, x).matrix)
    return bool(abs(w[-1] - 1.0) <= tol and np.all(np.abs(w[:-1]) <= tol))


def _row_of_basic(x: ModuleVector) -> np.ndarray:
    e = inner_product(x, x)
    u = projection_vector(e)
    return u.conj() @ x.matrix


def orthonormal_basis(d: int, m: int) -> OrthonormalBasis:
    """The standard basis ``x_j = u e_j^T`` with u the first basis vector of C^d."""
    if d < 1 or m < 1:
        raise InvalidInput("d and m must be positive")
    u = np.zeros(d)
    u[0] = 1.0
    return OrthonormalBasis(tuple(ModuleVector(np.outer(u, np.eye(m)[j])) for j in range(m)))


def localize(e0: CompactElement, x: ModuleVector) -> LocalizedVector:
    """Coordinates of ``e0 x`` in ``E_e0``; ``(., .) = tr <., .>`` becomes the dot product."""
    _same_d(e0, x)
    u = projection_vector(e0)
    return LocalizedVector(e0, u.conj() @ x.matrix)


def lift(e0: CompactElement, coords) -> ModuleVector:
    """Inverse of :func:`localize` on ``E_e0``."""
    return LocalizedVector(e0, coords).lift()


def standard_basepoint(d: int) -> CompactElement:
    return CompactElement.matrix_unit(d, 0, 0)


def _generated_coordinates(vs, e0: CompactElement) -> np.ndarray:
    """Localized coordinates spanning ``e0 (K . span vs)``.

    ``K x`` contains ``(u e_k^T) x`` for every matrix unit column, so the
    localization of the generated submodule is spanned by the coordinates of
    those vectors (one per row of each input).
    """
    u = projection_vector(e0)
    rows = []
    for x in vs:
        for k in range(x.dim_h):
            a = CompactElement(np.outer(u, np.eye(x.dim_h)[k]))
            rows.append(localize(e0, module_action(a, x)).coords)
    return np.array(rows, dtype=np.complex128)


def _check_family(vs):
    vs = list(vs)
    for x in vs[1:]:
        _same_shape(vs[0], x)
    return vs


def _orthonormalize_rows(R: np.ndarray, tol_rank: float) -> list:
    """Modified Gram-Schmidt (two passes) on rows, in input order.

    A row is dropped when its residual is at or below ``tol`` where tol is
    ``tol_rank`` if positive, otherwise ``max(shape) * eps * sigma_max``.
    """
    if R.size == 0:
        return []
    s_max = np.linalg.norm(R, 2)
    tol = tol_rank if tol_rank > 0 else max(16.0 * linalg.default_rank_tol(R.shape, s_max), 1e-13 * s_max)
    basis = []
    for r in R:
        v = r.copy()
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > tol:
            basis.append(v / nv)
    return basis


def gram_schmidt_module(vs, tol_rank: float = 0.0, e0: CompactElement | None = None) -> OrthonormalBasis:
    """Orthonormal system of basic vectors generating the same closed submodule as ``vs``.

    Localizes at ``e0`` (default: the first matrix unit), orthonormalizes the
    coordinates and lifts back, so every returned vector has Gram element e0.
    """
    vs = _check_family(vs)
    if not vs:
        return OrthonormalBasis(())
    if e0 is None:
        e0 = standard_basepoint(vs[0].dim_h)
    rows = _orthonormalize_rows(_generated_coordinates(vs, e0), tol_rank)
    return OrthonormalBasis(tuple(lift(e0, r) for r in rows))


def dim_K(vs, tol_rank: float = 0.0, e0: CompactElement | None = None) -> int:
    """Orthonormal dimension of the submodule generated by ``vs``."""
    return len(gram_schmidt_module(vs, tol_rank, e0))


def projection_multiplier(basis: OrthonormalBasis, m: int) -> np.ndarray:
    """Right multiplier of the orthogonal projection onto the span of an orthonormal basis."""
    P = np.zeros((m, m), dtype=np.complex128)
    for x in basis:
        P += x.matrix.conj().T @ x.matrix
    return P


def orthogonal_complement(vs, tol_rank: float = 0.0, m: int | None = None, d: int | None = None) -> OrthonormalBasis:
    """Orthonormal basis of the complement of the submodule generated by ``vs``.

    With ``vs`` empty the ambient shape must be given through ``d`` and ``m``.
    """
    vs = _check_family(vs)
    if vs:
        d0, m0 = vs[0].shape
        if (m is not None and m != m0) or (d is not None and d != d0):
            raise DimensionMismatch(f"ambient shape ({d}, {m}) disagrees with vectors {vs[0].shape}")
        d, m = d0, m0
    elif d is None or m is None:
        raise DimensionMismatch("d and m are required when vs is empty")
    e0 = standard_basepoint(d)
    inside = gram_schmidt_module(vs, tol_rank, e0)
    if len(inside) == 0:
        rows = list(np.eye(m, dtype=np.complex128))
    elif len(inside) == m:
        rows = []
    else:
        # c is orthogonal to every row r iff conj(R) c = 0
        R = inside.coordinates()
        _, _, Vh = np.linalg.svd(R.conj(), full_matrices=True)
        rows = list(Vh[len(inside):].conj())
    return OrthonormalBasis(tuple(lift(e0, r) for r in rows))


def decompose(x: ModuleVector, basis: OrthonormalBasis) -> tuple:
    """Split ``x = p + q`` with ``p`` in the span of ``basis`` and ``q`` orthogonal to it."""
    P = projection_multiplier(basis, x.dim_m)
    p = ModuleVector(x.matrix @ P)
    return p, x - p
