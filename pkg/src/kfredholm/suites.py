"""Named invariant suites run over the gallery and seeded random instances.

Each suite yields rows ``(instance, check, value, tolerance, passed)``; a row
passes when ``value <= tolerance`` (or, for verdict rows, when value is 0).
Every row keeps a ``replay`` payload that reproduces its instance.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .fredholm import fredholm_check_bounded, fredholm_check_regular, jsonable
from .gallery import GALLERY
from .module import CompactElement, ModuleVector, localize
from .operators import AdjointableOp, adjoint, kernel_range_transfer, psi, psi_inverse
from .regular import bounded_transform, round_trip_residual, verify_kernel_range_identities
from .towers import Diagonal, FiniteRank, OperatorTower, Sum, Symbol, WeightedShift

SUITES = ("psi-isomorphism", "atkinson-bounded", "atkinson-regular", "bounded-transform", "lemma42", "index-equality")

PSI_TOL = 1e-10
TRANSFER_TOL = 1e-10
NORM_SLACK = 1e-12
TRANSFORM_TOL = 1e-10
ROUND_TRIP_TOL = 1e-8
KERNEL_RANGE_TOL = 1e-10


@dataclass
class SuiteRow:
    instance: str
    check: str
    value: float
    tolerance: float
    replay: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


@dataclass
class SuiteResult:
    suite: str
    seed: int
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def instances(self) -> int:
        return len({r.instance for r in self.rows})

    def first_failure(self):
        return next((r for r in self.rows if not r.passed), None)

    def max_value(self, check: str) -> float:
        vals = [r.value for r in self.rows if r.check == check]
        return max(vals) if vals else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "instance", "check", "value", "tolerance", "passed"])
        for r in self.rows:
            w.writerow([self.suite, r.instance, r.check, repr(float(r.value)), repr(float(r.tolerance)), int(r.passed)])
        return buf.getvalue()

    def summary_csv(self) -> str:
        """One row per check: instance count, worst value, tolerance, failures."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "seed", "check", "instances", "max_value", "tolerance", "failures"])
        order = list(dict.fromkeys(r.check.split("@")[0] for r in self.rows))
        for check in order:
            rows = [r for r in self.rows if r.check.split("@")[0] == check]
            w.writerow([self.suite, self.seed, check, len(rows), f"{max(r.value for r in rows):.3e}",
                        f"{rows[0].tolerance:.0e}", sum(not r.passed for r in rows)])
        return buf.getvalue()

    def to_json(self) -> dict:
        first = self.first_failure()
        return jsonable({
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "instances": self.instances,
            "rows": [
                {"instance": r.instance, "check": r.check, "value": r.value, "tolerance": r.tolerance, "passed": r.passed}
                for r in self.rows
            ],
            "first_failure": None if first is None else {"instance": first.instance, "check": first.check, "replay": first.replay},
        })


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_minimal_projection(rng, d) -> CompactElement:
    u = random_complex(rng, d)
    u /= np.linalg.norm(u)
    return CompactElement(np.outer(u, u.conj()))


def random_operator(rng, d, m, rank=None) -> AdjointableOp:
    if rank is None:
        R = random_complex(rng, m, m)
    else:
        R = random_complex(rng, m, rank) @ random_complex(rng, rank, m)
    return AdjointableOp(d, m, R)


def random_bounded_generator(rng):
    """Sum of a weighted shift, a diagonal and a finite block, all with explicit bounded symbols."""
    k = int(rng.integers(-2, 3))
    L = int(rng.integers(3, 10))
    terms = [
        WeightedShift(k, Symbol(np.round(rng.uniform(-2, 2, L), 6).tolist())),
        Diagonal(Symbol(np.round(rng.uniform(-2, 2, L), 6).tolist(), "values")),
    ]
    r = int(rng.integers(1, 7))
    terms.append(FiniteRank(np.round(random_complex(rng, r, r), 6)))
    return Sum(tuple(terms))


def random_bounded_tower(rng, levels=(16, 32)) -> OperatorTower:
    return OperatorTower(random_bounded_generator(rng), levels)


def _psi_rows(rng, n_ops, max_m):
    rows = []
    for i in range(n_ops):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, max_m + 1))
        T = random_operator(rng, d, m)
        S = random_operator(rng, d, m)
        e0 = random_minimal_projection(rng, d)
        x = ModuleVector(random_complex(rng, d, m))
        replay = {"d": d, "m": m, "T": T.to_json(), "S": S.to_json(), "e0": e0.to_json()}
        name = f"random-op-{i}"
        PT, PS = psi(T, e0), psi(S, e0)
        rows.append(SuiteRow(name, "homomorphism", linalg.opnorm(psi(T @ S, e0) - PT @ PS), PSI_TOL, replay))
        rows.append(SuiteRow(name, "star", linalg.opnorm(psi(adjoint(T), e0) - PT.conj().T), PSI_TOL, replay))
        rows.append(SuiteRow(name, "isometry", abs(linalg.opnorm(PT) - linalg.opnorm(T.right_mult)), PSI_TOL, replay))
        rows.append(SuiteRow(name, "round-trip-S", linalg.opnorm(psi(psi_inverse(PS, e0), e0) - PS), PSI_TOL, replay))
        rows.append(SuiteRow(name, "round-trip-T", linalg.opnorm(psi_inverse(PT, e0).right_mult - T.right_mult), PSI_TOL, replay))
        lhs = PT @ localize(e0, x).coords
        rhs = localize(e0, T(x)).coords
        rows.append(SuiteRow(name, "intertwining", float(np.linalg.norm(lhs - rhs)), PSI_TOL, replay))
    return rows


def transfer_rows(rng, n_ops=100):
    """Kernel/range transfer on random rank-deficient operators, m in 2..8."""
    rows = []
    for i in range(n_ops):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(2, 9))
        r = int(rng.integers(1, m))
        T = random_operator(rng, d, m, rank=r)
        e = random_minimal_projection(rng, d)
        chk = kernel_range_transfer(T, e, 1e-9)
        replay = {"T": T.to_json(), "e": e.to_json()}
        name = f"rank-deficient-{i}"
        rows.append(SuiteRow(name, "ker-transfer", chk.ker_check, TRANSFER_TOL, replay))
        rows.append(SuiteRow(name, "ran-transfer", chk.ran_check, TRANSFER_TOL, replay))
        rows.append(SuiteRow(name, "ker-dim-match", float(chk.ker_dim_psi != chk.ker_dim_module or chk.ker_dim_psi != m - r), 0.0, replay))
    return rows


def psi_isomorphism(seed=0, n_ops=200, max_m=16, n_transfer=100) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows = _psi_rows(rng, n_ops, max_m) + transfer_rows(rng, n_transfer)
    return SuiteResult("psi-isomorphism", seed, rows)


def _verdict_rows(name, rep, replay):
    rows = [SuiteRow(name, f"{rep.path}-criterion-vs-pseudo-inverse", float(not rep.atkinson_agrees), 0.0, replay)]
    if rep.companion is not None:
        c = rep.companion
        rows.append(SuiteRow(name, f"{c.path}-criterion-vs-pseudo-inverse", float(not c.atkinson_agrees), 0.0, replay))
        same = rep.is_fredholm == c.is_fredholm and rep.index == c.index
        rows.append(SuiteRow(name, "direct-vs-transform", float(not same), 0.0, replay))
    return rows


def atkinson_bounded(seed=0, n_random=30, levels=(16, 32)) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows = []
    for g in GALLERY:
        if g.unbounded:
            continue
        t = g.tower(levels)
        rows += _verdict_rows(g.name, fredholm_check_bounded(t), {"generator": g.generator, "levels": list(levels)})
    for i in range(n_random):
        gen = Sum((WeightedShift(int(rng.integers(1, 4)), Symbol(1)),
                   FiniteRank(random_complex(rng, 4, 4) * 0.3)))
        t = OperatorTower(gen, levels)
        rows += _verdict_rows(f"perturbed-shift-{i}", fredholm_check_bounded(t), {"generator": gen.to_json(), "levels": list(levels)})
    for i in range(n_random):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 9))
        T = random_operator(rng, d, m, rank=int(rng.integers(1, m + 1)))
        rep = fredholm_check_bounded(T)
        rows += _verdict_rows(f"finite-op-{i}", rep, {"T": T.to_json()})
        rows.append(SuiteRow(f"finite-op-{i}", "index-zero", float(abs(rep.index)), 0.0, {"T": T.to_json()}))
    return SuiteResult("atkinson-bounded", seed, rows)


def atkinson_regular(seed=0, levels=(16, 32)) -> SuiteResult:
    rows = []
    for g in GALLERY:
        rep = fredholm_check_regular(g.tower(levels))
        replay = {"generator": g.generator, "levels": list(levels)}
        rows += _verdict_rows(g.name, rep, replay)
        rows.append(SuiteRow(g.name, "expected-verdict", float(rep.is_fredholm != g.is_fredholm), 0.0, replay))
    return SuiteResult("atkinson-regular", seed, rows)


def _transform_rows(name, t, replay):
    res = bounded_transform(t)
    rows = [
        SuiteRow(name, "norm-F", res.norm_F - 1.0, NORM_SLACK, replay),
        SuiteRow(name, "F-adjoint", max(res.adjoint_residual), TRANSFORM_TOL, replay),
        SuiteRow(name, "Q-squared", max(res.defect_residual), TRANSFORM_TOL, replay),
        SuiteRow(name, "round-trip", max(round_trip_residual(t)), ROUND_TRIP_TOL, replay),
    ]
    return rows


def bounded_transform_suite(seed=0, n_random=100, levels=(16, 32)) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows = []
    for g in GALLERY:
        rows += _transform_rows(g.name, g.tower(levels), {"generator": g.generator, "levels": list(levels)})
    for i in range(n_random):
        t = random_bounded_tower(rng, levels)
        rows += _transform_rows(f"random-tower-{i}", t, {"generator": t.to_json(), "levels": list(levels)})
    return SuiteResult("bounded-transform", seed, rows)


def kernel_range_suite(seed=0, levels=(16, 32)) -> SuiteResult:
    rows = []
    for g in GALLERY:
        rep = verify_kernel_range_identities(g.tower(levels), tol_residual=KERNEL_RANGE_TOL)
        replay = {"generator": g.generator, "levels": list(levels)}
        for check, vals in (
            ("ker-t-vs-ker-F", rep.ker_t_vs_ker_F),
            ("ker-t*-vs-ker-F*", rep.ker_ts_vs_ker_Fs),
            ("ran-t-vs-ran-F", rep.ran_t_vs_ran_F),
            ("ran-t*-vs-ran-F*", rep.ran_ts_vs_ran_Fs),
            ("ker-t*-vs-ran-t-perp", rep.ker_ts_vs_ran_t_perp),
            ("ker-t-vs-ran-t*-perp", rep.ker_t_vs_ran_ts_perp),
        ):
            for N, v in zip(rep.levels, vals):
                rows.append(SuiteRow(g.name, f"{check}@{N}", v, KERNEL_RANGE_TOL, replay))
    return SuiteResult("lemma42", seed, rows)


def index_equality(seed=0, levels=(16, 32)) -> SuiteResult:
    rows = []
    for g in GALLERY:
        if not g.is_fredholm:
            continue
        rep = fredholm_check_regular(g.tower(levels))
        direct = rep if rep.path == "direct" else rep.companion
        via_F = rep.companion if rep.path == "direct" else rep
        replay = {"generator": g.generator, "levels": list(levels)}
        ok_direct = direct.is_fredholm and direct.index == g.index
        ok_F = via_F.is_fredholm and via_F.index == g.index
        rows.append(SuiteRow(g.name, "direct-index", float(not ok_direct), 0.0, replay))
        rows.append(SuiteRow(g.name, "transform-index", float(not ok_F), 0.0, replay))
        rows.append(SuiteRow(g.name, "ind-t-equals-ind-F", float(direct.index != via_F.index), 0.0, replay))
    return SuiteResult("index-equality", seed, rows)


RUNNERS = {
    "psi-isomorphism": psi_isomorphism,
    "atkinson-bounded": atkinson_bounded,
    "atkinson-regular": atkinson_regular,
    "bounded-transform": bounded_transform_suite,
    "lemma42": kernel_range_suite,
    "index-equality": index_equality,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    return RUNNERS[name](seed=seed)
