"""Regular (possibly unbounded) operators through truncation towers.

Bounded transform, inverse transform, regularity surrogate, kernel/range
identities between t and F_t, and level-wise Moore-Penrose pseudo-inverses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DefectSingular, NoPseudoInverse
from .operators import AdjointableOp, adjoint
from .towers import OperatorTower

NORM_SLACK = 1e-12
STAB_RTOL = 1e-6


def adjoint_tower(t: OperatorTower) -> OperatorTower:
    """Symbol-level adjoint (shifts flip their step, blocks are conjugate-transposed)."""
    return t.adjoint()


@dataclass
class RegularityReport:
    levels: list
    min_eig: list  # smallest eigenvalue of 1 + T_N* T_N per level
    psd_residual: list  # how far T_N* T_N is below zero, per level
    domain_ok: bool
    regular: bool
    tol: float


def check_regularity(t: OperatorTower, tol: float = 1e-12) -> RegularityReport:
    """Truncated surrogate of "1 + t*t has dense range".

    At each level 1 + T*T must have smallest eigenvalue >= 1 - tol (so it is
    invertible), and every compactly supported coordinate vector must be
    mapped to finite values (the operational dense domain).
    """
    mins, psd, domain_ok = [], [], True
    for N in t.levels:
        T = t.compression(N)
        G = T.conj().T @ T
        w, _ = linalg.hermitian_eig(G)
        psd.append(float(max(0.0, -w[0])))
        mins.append(float(1.0 + w[0]))
        domain_ok &= bool(np.all(np.isfinite(t.section(N))))
    regular = domain_ok and all(m >= 1.0 - tol for m in mins)
    return RegularityReport(list(t.levels), mins, psd, domain_ok, regular, tol)


def transform_operator(T: AdjointableOp):
    """Return ``(F, Q, defect)`` for a bounded operator at one level.

    ``Q = (1 + T*T)^(-1/2)`` via functional calculus, ``F = T Q``,
    ``defect = 1 - F*F``.
    """
    TsT = adjoint(T) @ T
    Q = AdjointableOp(T.dim_h, T.dim_m, linalg.hermitian_function(TsT.right_mult, linalg.inv_sqrt_one_plus))
    F = T @ Q
    defect = AdjointableOp.identity(T.dim_h, T.dim_m) - adjoint(F) @ F
    return F, Q, defect


@dataclass
class BoundedTransformResult:
    levels: list
    F: list
    Q: list
    defect: list
    norm_F: float
    adjoint_residual: list  # ||F_{t*} - F_t*|| per level
    defect_residual: list  # ||Q^2 - (1 - F*F)|| per level
    norm_ok: bool = field(init=False)

    def __post_init__(self):
        self.norm_ok = self.norm_F <= 1.0 + NORM_SLACK


def bounded_transform(t: OperatorTower) -> BoundedTransformResult:
    """F_N = T_N (1 + T_N* T_N)^(-1/2) on the square corner at every level."""
    ts = t.adjoint()
    Fs, Qs, Ds, adj_res, def_res = [], [], [], [], []
    norm_F = 0.0
    for N in t.levels:
        F, Q, D = transform_operator(t.level(N))
        F_star, _, _ = transform_operator(ts.level(N))
        Fs.append(F)
        Qs.append(Q)
        Ds.append(D)
        norm_F = max(norm_F, F.norm())
        adj_res.append(linalg.opnorm(F_star.right_mult - adjoint(F).right_mult))
        def_res.append(linalg.opnorm((Q @ Q).right_mult - D.right_mult))
    return BoundedTransformResult(list(t.levels), Fs, Qs, Ds, norm_F, adj_res, def_res)


def inverse_transform(F: AdjointableOp, tol: float = 1e-12) -> AdjointableOp:
    """Recover t = F (1 - F*F)^(-1/2).

    Raises
    ------
    DefectSingular
        If the smallest eigenvalue of 1 - F*F is at or below ``tol``; such an F
        is the transform of nothing bounded at this level.
    """
    D = AdjointableOp.identity(F.dim_h, F.dim_m) - adjoint(F) @ F
    w, _ = linalg.hermitian_eig(D.right_mult)
    if w[0] <= tol:
        raise DefectSingular(f"min eigenvalue of 1 - F*F is {w[0]:.3e} <= {tol:.1e}")
    R = linalg.hermitian_function(D.right_mult, lambda x: 1.0 / np.sqrt(x), linalg.above(tol))
    return F @ AdjointableOp(F.dim_h, F.dim_m, R)


def round_trip_residual(t: OperatorTower, tol: float = 1e-12) -> list:
    """Relative error of t -> F_t -> t per level (absolute when T_N = 0)."""
    out = []
    for N in t.levels:
        T = t.level(N)
        F, _, _ = transform_operator(T)
        back = inverse_transform(F, tol)
        out.append(linalg.opnorm(back.right_mult - T.right_mult) / max(1.0, T.norm()))
    return out


def defect_floor(t: OperatorTower) -> list:
    """Smallest eigenvalue of 1 - F_N* F_N per level."""
    out = []
    for N in t.levels:
        _, _, D = transform_operator(t.level(N))
        out.append(float(linalg.hermitian_eig(D.right_mult)[0][0]))
    return out


def _rel_stable(values, rtol) -> bool:
    vals = [v for v in values]
    for a, b in zip(vals, vals[1:]):
        if np.isinf(a) or np.isinf(b):
            if a != b:
                return False
            continue
        if abs(a - b) > rtol * max(abs(a), abs(b), 1e-300):
            return False
    return True


@dataclass
class KernelRangeReport:
    levels: list
    ker_t_vs_ker_F: list
    ker_ts_vs_ker_Fs: list
    ran_t_vs_ran_F: list
    ran_ts_vs_ran_Fs: list
    ker_ts_vs_ran_t_perp: list
    ker_t_vs_ran_ts_perp: list
    dims: list  # per level: dict of subspace dimensions
    tol_rank: float
    tol_residual: float
    dims_stable: bool

    @property
    def stable(self) -> bool:
        """Every clause holds within ``tol_residual`` at every level."""
        return self.max_residual() <= self.tol_residual

    def max_residual(self) -> float:
        rows = (self.ker_t_vs_ker_F, self.ker_ts_vs_ker_Fs, self.ran_t_vs_ran_F,
                self.ran_ts_vs_ran_Fs, self.ker_ts_vs_ran_t_perp, self.ker_t_vs_ran_ts_perp)
        return max(max(r) for r in rows)


def _perp_within(S_big: np.ndarray, N: int, tol_rank: float) -> np.ndarray:
    """``(Ran S_big)^perp`` intersected with the first N coordinates."""
    return linalg.kernel_basis(S_big[:N, :].conj().T, tol_rank)


def verify_kernel_range_identities(t: OperatorTower, tol_rank: float = 1e-8, tol_residual: float = 1e-10) -> KernelRangeReport:
    """Compare Ker/Ran of t, t*, F_t, F_t* level by level.

    All subspaces come from exact sections, so at level N they are the
    intersections with the first N coordinates (kernels) or the images of
    them (ranges).  The orthogonal-complement clause uses the section of the
    other operator at level ``N + band`` so that everything it can reach is
    visible.
    """
    ts = t.adjoint()
    F = t.transform()
    Fs = F.adjoint()
    out = {k: [] for k in ("kF", "ksFs", "rF", "rsFs", "kperp", "ksperp")}
    dims = []
    for N in t.levels:
        St, Sts, SF, SFs = t.section(N), ts.section(N), F.section(N), Fs.section(N)
        ker_t = linalg.kernel_basis(St, tol_rank)
        ker_ts = linalg.kernel_basis(Sts, tol_rank)
        ker_F = linalg.kernel_basis(SF, tol_rank)
        ker_Fs = linalg.kernel_basis(SFs, tol_rank)
        ran_t = linalg.range_basis(St, tol_rank)
        ran_F = linalg.range_basis(SF, tol_rank)
        ran_ts = linalg.range_basis(Sts, tol_rank)
        ran_Fs = linalg.range_basis(SFs, tol_rank)
        perp_ran_t = _perp_within(t.section(N + t.upper), N, tol_rank)
        perp_ran_ts = _perp_within(ts.section(N + t.lower), N, tol_rank)
        out["kF"].append(linalg.mutual_containment(ker_t, ker_F))
        out["ksFs"].append(linalg.mutual_containment(ker_ts, ker_Fs))
        out["rF"].append(linalg.mutual_containment(ran_t, ran_F))
        out["rsFs"].append(linalg.mutual_containment(ran_ts, ran_Fs))
        out["kperp"].append(linalg.mutual_containment(ker_ts, perp_ran_t))
        out["ksperp"].append(linalg.mutual_containment(ker_t, perp_ran_ts))
        dims.append({
            "ker_t": ker_t.shape[1], "ker_F": ker_F.shape[1],
            "ker_t_adj": ker_ts.shape[1], "ker_F_adj": ker_Fs.shape[1],
            "ran_t_perp": perp_ran_t.shape[1], "ran_t_adj_perp": perp_ran_ts.shape[1],
        })
    dims_stable = all(d == dims[0] for d in dims)
    return KernelRangeReport(list(t.levels), out["kF"], out["ksFs"], out["rF"], out["rsFs"],
                         out["kperp"], out["ksperp"], dims, tol_rank, tol_residual, dims_stable)


@dataclass
class PseudoInverseLevels:
    """Moore-Penrose data of a tower, level by level.

    ``G_left[i]`` is the pseudo-inverse of the section of t, so
    ``G_left t - 1`` is minus the projection onto the kernel.  ``G_right[i]`` is
    the adjoint of the pseudo-inverse of the section of t*, so ``t G_right - 1``
    is minus the projection onto Ker t*.
    """

    levels: list
    G_left: list
    G_right: list
    left_defect: list  # G_left S - 1, per level
    right_defect: list  # S' G_right - 1 with S' = (section of t*)*, per level
    left_rank: list
    right_rank: list
    G_norm: list
    G_right_norm: list
    GT_norm: list  # ||G_left S||, the uniform bound standing in for closability
    idempotence_residual: list  # max(||D^2 + D||) over both defects, per level
    tol_rank: float

    def ranks_stable(self) -> bool:
        return len(set(self.left_rank)) == 1 and len(set(self.right_rank)) == 1

    def norms_stable(self, rtol=STAB_RTOL) -> bool:
        return _rel_stable(self.G_norm, rtol) and _rel_stable(self.G_right_norm, rtol)


def pseudo_inverse_levels(t: OperatorTower, tol_rank: float = 1e-8) -> PseudoInverseLevels:
    ts = t.adjoint()
    data = {k: [] for k in ("GL", "GR", "DL", "DR", "rl", "rr", "gn", "grn", "gt", "idem")}
    for N in t.levels:
        S = t.section(N)
        Sp = ts.section(N)
        GL = linalg.pinv(S, tol_rank)
        GR = linalg.pinv(Sp, tol_rank).conj().T
        DL = GL @ S - np.eye(N)
        DR = Sp.conj().T @ GR - np.eye(N)
        data["GL"].append(GL)
        data["GR"].append(GR)
        data["DL"].append(DL)
        data["DR"].append(DR)
        data["rl"].append(linalg.numerical_rank(DL, 0.5).rank)
        data["rr"].append(linalg.numerical_rank(DR, 0.5).rank)
        data["gn"].append(linalg.opnorm(GL))
        data["grn"].append(linalg.opnorm(GR))
        data["gt"].append(linalg.opnorm(GL @ S))
        data["idem"].append(max(linalg.opnorm(DL @ DL + DL), linalg.opnorm(DR @ DR + DR)))
    return PseudoInverseLevels(list(t.levels), data["GL"], data["GR"], data["DL"], data["DR"],
                               data["rl"], data["rr"], data["gn"], data["grn"], data["gt"],
                               data["idem"], tol_rank)


def pseudo_inverse_regular(t: OperatorTower, tol: float = 1e-8) -> PseudoInverseLevels:
    """Pseudo left/right inverses with finite-rank defects of level-stable rank.

    Raises
    ------
    NoPseudoInverse
        If the defect ranks or the pseudo-inverse norms change between levels.
    """
    pi = pseudo_inverse_levels(t, tol)
    if not pi.ranks_stable():
        raise NoPseudoInverse(f"defect ranks not stable: left {pi.left_rank}, right {pi.right_rank}")
    if not pi.norms_stable():
        raise NoPseudoInverse(f"pseudo-inverse norms grow: {pi.G_norm} / {pi.G_right_norm}")
    return pi
