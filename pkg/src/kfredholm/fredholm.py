"""Fredholm detection and index for bounded operators and towers.

"Finite dim_K" is certified by stabilization: a kernel dimension counts as
finite when it is identical at every checked level.  "Closed range" means the
smallest nonzero singular value of the section stays above the tolerance and
does not drift between levels.  Both are operational choices and every
report says so in ``certification``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, linalg
from .errors import IndexNonzero, NotFredholm
from .operators import AdjointableOp, psi
from .regular import STAB_RTOL, _rel_stable, pseudo_inverse_levels
from .towers import FiniteRank, OperatorTower, Sum

TOL_RANK = 1e-8
CERTIFICATION = (
    "kernel dimensions counted as finite when identical at all levels; "
    "closed range when the smallest nonzero singular value exceeds the rank "
    "tolerance and is level-stable"
)


@dataclass
class FredholmReport:
    is_fredholm: bool
    ker_dim: int
    coker_dim: int
    index: int | None
    closed_range: bool
    sigma_gap: float
    levels_checked: list
    stabilized: bool
    tol_rank: float
    pseudo_inverse_residuals: tuple
    path: str = "direct"
    ker_dims: list = field(default_factory=list)
    coker_dims: list = field(default_factory=list)
    sigma_gaps: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    normalized: bool = False
    tol_effective: float = 0.0
    pseudo_inverse_fredholm: bool = False
    left_defect_ranks: list = field(default_factory=list)
    right_defect_ranks: list = field(default_factory=list)
    pseudo_inverse_norms: list = field(default_factory=list)
    closability_bound: list = field(default_factory=list)
    companion: "FredholmReport | None" = None
    disagreements: list = field(default_factory=list)
    generator: dict | None = None
    certification: str = CERTIFICATION

    @property
    def atkinson_agrees(self) -> bool:
        """Criterion verdict equals the pseudo-inverse verdict."""
        return self.is_fredholm == self.pseudo_inverse_fredholm

    def to_json(self) -> dict:
        out = asdict(self)
        out["companion"] = self.companion.to_json() if self.companion is not None else None
        out["atkinson_agrees"] = self.atkinson_agrees
        out["version"] = __version__
        return jsonable(out)


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _gap(s: np.ndarray, tol: float) -> float:
    nz = s[s > tol]
    return float(nz[-1]) if nz.size else float("inf")


def kernel_dim_K(T, tol_rank: float = 0.0):
    """dim_K Ker T.

    For an :class:`AdjointableOp` this is ``m - rank`` of the right multiplier
    (the Hilbert-space kernel dimension of Psi(T)).  For a tower it returns
    ``(dims_per_level, stable)`` computed on exact sections.
    """
    if isinstance(T, AdjointableOp):
        return T.dim_m - linalg.numerical_rank(T.right_mult, tol_rank).rank
    dims = [linalg.kernel_basis(T.section(N), tol_rank).shape[1] for N in T.levels]
    return dims, len(set(dims)) == 1


def _finite_report(T: AdjointableOp, tol_rank: float) -> FredholmReport:
    """Single fixed truncation: everything is Fredholm with index 0."""
    P = psi(T)
    r = linalg.numerical_rank(P, tol_rank)
    rs = linalg.numerical_rank(P.conj().T, tol_rank)
    ker, coker = T.dim_m - r.rank, T.dim_m - rs.rank
    G = linalg.pinv(P, r.tol_used)
    DL = G @ P - np.eye(T.dim_m)
    DR = P @ G - np.eye(T.dim_m)
    gap = _gap(r.sigma, r.tol_used)
    return FredholmReport(
        is_fredholm=True,
        ker_dim=ker,
        coker_dim=coker,
        index=ker - coker,
        closed_range=True,
        sigma_gap=gap,
        levels_checked=[T.dim_m],
        stabilized=True,
        tol_rank=tol_rank,
        pseudo_inverse_residuals=(linalg.opnorm(DL @ DL + DL), linalg.opnorm(DR @ DR + DR)),
        path="finite",
        ker_dims=[ker],
        coker_dims=[coker],
        sigma_gaps=[gap],
        norms=[T.norm()],
        tol_effective=r.tol_used,
        pseudo_inverse_fredholm=True,
        left_defect_ranks=[linalg.numerical_rank(DL, 0.5).rank],
        right_defect_ranks=[linalg.numerical_rank(DR, 0.5).rank],
        pseudo_inverse_norms=[linalg.opnorm(G)],
        closability_bound=[linalg.opnorm(G @ P)],
    )


def _tower_report(t: OperatorTower, tol_rank: float, path: str, stab_rtol: float) -> FredholmReport:
    ts = t.adjoint()
    sections = {N: t.section(N) for N in t.levels}
    norms = [linalg.opnorm(sections[N]) for N in t.levels]
    normalized = (not t.unbounded) and norms[0] > 0 and _rel_stable(norms, stab_rtol)
    tol = tol_rank * norms[-1] if normalized else tol_rank
    ker_dims, coker_dims, gaps = [], [], []
    for N in t.levels:
        s = np.linalg.svd(sections[N], compute_uv=False)
        ker_dims.append(int(N - np.count_nonzero(s > tol)))
        coker_dims.append(linalg.kernel_basis(ts.section(N), tol).shape[1])
        gaps.append(_gap(s, tol))
    dims_stable = len(set(ker_dims)) == 1 and len(set(coker_dims)) == 1
    gap_stable = _rel_stable(gaps, stab_rtol)
    closed = all(g > tol for g in gaps) and gap_stable
    is_fredholm = closed and dims_stable

    pi = pseudo_inverse_levels(t, tol)
    pi_fredholm = pi.ranks_stable() and pi.norms_stable(stab_rtol)
    return FredholmReport(
        is_fredholm=is_fredholm,
        ker_dim=ker_dims[-1],
        coker_dim=coker_dims[-1],
        index=(ker_dims[-1] - coker_dims[-1]) if is_fredholm else None,
        closed_range=closed,
        sigma_gap=gaps[-1],
        levels_checked=list(t.levels),
        stabilized=dims_stable and gap_stable,
        tol_rank=tol_rank,
        pseudo_inverse_residuals=(
            max(linalg.opnorm(D @ D + D) for D in pi.left_defect),
            max(linalg.opnorm(D @ D + D) for D in pi.right_defect),
        ),
        path=path,
        ker_dims=ker_dims,
        coker_dims=coker_dims,
        sigma_gaps=gaps,
        norms=norms,
        normalized=normalized,
        tol_effective=tol,
        pseudo_inverse_fredholm=pi_fredholm,
        left_defect_ranks=pi.left_rank,
        right_defect_ranks=pi.right_rank,
        pseudo_inverse_norms=pi.G_norm,
        closability_bound=pi.GT_norm,
        generator=t.to_json(),
    )


def fredholm_check_bounded(T, tol_rank: float = TOL_RANK, stab_rtol: float = STAB_RTOL) -> FredholmReport:
    """Closed range + finite kernel and cokernel, with the pseudo-inverse verdict alongside."""
    if isinstance(T, AdjointableOp):
        return _finite_report(T, tol_rank)
    rep = _tower_report(T, tol_rank, "direct", stab_rtol)
    if not rep.atkinson_agrees:
        rep.disagreements.append(
            f"direct: criterion says {rep.is_fredholm}, pseudo-inverse says {rep.pseudo_inverse_fredholm}")
    return rep


def _compare(a: FredholmReport, b: FredholmReport) -> list:
    out = []
    for rep in (a, b):
        if not rep.atkinson_agrees:
            out.append(f"{rep.path}: criterion says {rep.is_fredholm}, pseudo-inverse says {rep.pseudo_inverse_fredholm}")
    if a.is_fredholm != b.is_fredholm:
        out.append(f"verdict: {a.path} {a.is_fredholm} vs {b.path} {b.is_fredholm}")
    elif a.is_fredholm and (a.ker_dim, a.coker_dim) != (b.ker_dim, b.coker_dim):
        out.append(f"dims: {a.path} ({a.ker_dim}, {a.coker_dim}) vs {b.path} ({b.ker_dim}, {b.coker_dim})")
    return out


def fredholm_check_regular(t: OperatorTower, tol_rank: float = TOL_RANK, stab_rtol: float = STAB_RTOL) -> FredholmReport:
    """Run the criterion on t and on F_t independently and compare.

    The headline report is the F_t path for unbounded towers and the direct
    path otherwise; the other one is attached as ``companion``.  Any mismatch
    in verdict, dimensions, or criterion-vs-pseudo-inverse lands in
    ``disagreements`` (on both reports).
    """
    direct = _tower_report(t, tol_rank, "direct", stab_rtol)
    via_F = _tower_report(t.transform(), tol_rank, "transform", stab_rtol)
    via_F.generator = t.to_json()
    head, other = (via_F, direct) if t.unbounded else (direct, via_F)
    issues = _compare(head, other)
    head.disagreements = list(issues)
    other.disagreements = list(issues)
    head.companion = other
    return head


def index(obj, tol_rank: float = TOL_RANK) -> int:
    """Fredholm index of a report, an operator, or a tower.

    For towers the index of t and of F_t are both computed and must agree.
    """
    if isinstance(obj, FredholmReport):
        rep = obj
    elif isinstance(obj, AdjointableOp):
        rep = fredholm_check_bounded(obj, tol_rank)
    else:
        rep = fredholm_check_regular(obj, tol_rank)
    if not rep.is_fredholm:
        raise NotFredholm(f"not Fredholm: ker dims {rep.ker_dims}, coker dims {rep.coker_dims}, closed range {rep.closed_range}")
    if rep.companion is not None and rep.companion.is_fredholm and rep.companion.index != rep.index:
        raise ArithmeticError(f"index of t ({rep.index}) and of F_t ({rep.companion.index}) disagree")
    return rep.index


def _fix_phase(B: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real and positive."""
    B = B.copy()
    for k in range(B.shape[1]):
        i = int(np.argmax(np.abs(B[:, k])))
        B[:, k] *= abs(B[i, k]) / B[i, k]
    return B


@dataclass
class Decomposition:
    """T_N = V_N + K_N with V invertible and K of stable finite rank."""

    levels: list
    V: list
    K: list
    V_min_sigma: list
    K_rank: list
    reconstruction_residual: list
    V_report: FredholmReport
    invertible: bool
    finite_rank_block: np.ndarray


def compact_plus_invertible(t: OperatorTower, tol: float = 1e-8, tol_rank: float = TOL_RANK) -> Decomposition:
    """Split an index-0 Fredholm tower into invertible + finite rank.

    ``C = sum_i c_i k_i*`` maps an orthonormal kernel basis onto an
    orthonormal cokernel basis (both taken at the first level, where they are
    already stable); ``V = t + C`` and ``K = -C``.

    Raises
    ------
    NotFredholm, IndexNonzero
    """
    rep = fredholm_check_regular(t, tol_rank)
    if not rep.is_fredholm:
        raise NotFredholm("compact_plus_invertible needs a Fredholm tower")
    if rep.index != 0:
        raise IndexNonzero(f"index is {rep.index}, not 0")
    direct = rep if rep.path == "direct" else rep.companion
    N0 = t.levels[0]
    ker = _fix_phase(linalg.kernel_basis(t.section(N0), direct.tol_effective))
    coker = _fix_phase(linalg.kernel_basis(t.adjoint().section(N0), direct.tol_effective))
    C = coker @ ker.conj().T if ker.shape[1] else np.zeros((1, 1), dtype=np.complex128)
    V = OperatorTower(Sum((t.generator, FiniteRank(C))), t.levels, t.dim_h)
    K = FiniteRank(-C)
    Vs, Ks, smin, kr, res = [], [], [], [], []
    for N in t.levels:
        rows = N + V.lower
        T_N = t.generator.compression(rows)[:, :N]
        V_N = V.generator.compression(rows)[:, :N]
        K_N = K.compression(rows)[:, :N]
        Vs.append(V_N)
        Ks.append(K_N)
        smin.append(float(np.linalg.svd(V_N, compute_uv=False)[-1]))
        kr.append(linalg.numerical_rank(K_N).rank)
        res.append(float(np.max(np.abs(T_N - V_N - K_N))))
    V_rep = fredholm_check_bounded(V, tol_rank) if not t.unbounded else fredholm_check_regular(V, tol_rank)
    invertible = (V_rep.is_fredholm and V_rep.ker_dim == 0 and V_rep.coker_dim == 0
                  and all(s >= tol for s in smin))
    return Decomposition(list(t.levels), Vs, Ks, smin, kr, res, V_rep, invertible, C)
