"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``ACCEPTANCE PASS|FAIL <criterion>: <evidence>`` line.
Run directly (``python tests/test_acceptance.py``) for just the summary.
"""
import json
import sys
from pathlib import Path

import numpy as np
import pytest

from kfredholm import gallery, suites
from kfredholm.cli import main as cli_main
from kfredholm.fredholm import compact_plus_invertible, fredholm_check_bounded, fredholm_check_regular
from kfredholm.module import CompactElement, ModuleVector, inner_product, module_action
from kfredholm.regular import verify_kernel_range_identities

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parents[1]


def report(name, ok, evidence):
    line = f"ACCEPTANCE {'PASS' if ok else 'FAIL'} {name}: {evidence}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_module_axioms():
    rng = np.random.default_rng(0)
    herm = lin = psd = 0.0
    for _ in range(500):
        d, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        x = ModuleVector(rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m)))
        y = ModuleVector(rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m)))
        a = CompactElement(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        xy = inner_product(x, y).matrix
        herm = max(herm, np.abs(xy.conj().T - inner_product(y, x).matrix).max())
        lin = max(lin, np.abs(inner_product(module_action(a, x), y).matrix - a.matrix @ xy).max())
        psd = min(psd, np.linalg.eigvalsh(inner_product(x, x).matrix).min())
    ok = herm <= 1e-12 and lin <= 1e-12 and psd >= -1e-12
    report("module-axioms", ok, f"500 instances, hermitian {herm:.1e}, linearity {lin:.1e}, min eig {psd:.1e}")


def test_psi_isomorphism():
    res = suites.psi_isomorphism(seed=0, n_ops=200, max_m=16, n_transfer=0)
    worst = {c: res.max_value(c) for c in ("homomorphism", "star", "isometry", "round-trip-S", "round-trip-T")}
    ok = res.instances == 200 and max(worst.values()) <= 1e-10
    report("psi-isomorphism", ok, f"{res.instances} operators, worst " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_kernel_range_transfer():
    rows = suites.transfer_rows(np.random.default_rng(0), 100)
    ker = max(r.value for r in rows if r.check == "ker-transfer")
    ran = max(r.value for r in rows if r.check == "ran-transfer")
    dims = all(r.passed for r in rows if r.check == "ker-dim-match")
    ok = ker <= 1e-10 and ran <= 1e-10 and dims
    report("kernel-range-transfer", ok, f"100 rank-deficient operators, ker {ker:.1e}, ran {ran:.1e}, dims agree {dims}")


def test_bounded_transform():
    res = suites.bounded_transform_suite(seed=0, n_random=100)
    nf, adj = res.max_value("norm-F"), res.max_value("F-adjoint")
    q2, rt = res.max_value("Q-squared"), res.max_value("round-trip")
    ok = res.passed and res.instances == len(gallery.GALLERY) + 100
    report("bounded-transform", ok,
           f"{res.instances} towers, ||F||-1 {nf:.1e}, F(t*)-F(t)* {adj:.1e}, Q^2 {q2:.1e}, round trip {rt:.1e}")


def test_kernel_range_identities():
    worst, names = 0.0, []
    for g in gallery.GALLERY:
        rep = verify_kernel_range_identities(g.tower((16, 32)), tol_residual=1e-10)
        worst = max(worst, rep.max_residual())
        if not rep.stable:
            names.append(g.name)
        if g.is_fredholm and not rep.dims_stable:
            names.append(g.name + " (dims)")
    ok = worst <= 1e-10 and not names
    report("kernel-range-identities", ok, f"{len(gallery.GALLERY)} gallery towers at 16/32, worst residual {worst:.1e}, failing {names}")


def test_atkinson_equivalence():
    disagreements = []
    for g in gallery.GALLERY:
        t = g.tower((16, 32))
        reps = [fredholm_check_regular(t)]
        if not g.unbounded:
            reps.append(fredholm_check_bounded(t))
        for rep in reps:
            for r in (rep, rep.companion):
                if r is not None and not r.atkinson_agrees:
                    disagreements.append(f"{g.name}/{r.path}")
            disagreements += [f"{g.name}: {d}" for d in rep.disagreements]
    report("atkinson-equivalence", not disagreements,
           f"{len(gallery.GALLERY)} gallery towers, {len(disagreements)} disagreements {disagreements}")


def test_index_equality():
    expected = {"shift-1": -1, "shift-2": -2, "shift-3": -3, "diagonal-n": 0,
                "finite-rank-perturbed-shift": -1, "weighted-shift-n": -1}
    got = {}
    for name, want in expected.items():
        rep = fredholm_check_regular(gallery.get(name).tower((16, 32)))
        direct = rep if rep.path == "direct" else rep.companion
        via_F = rep.companion if rep.path == "direct" else rep
        got[name] = (direct.index, via_F.index)
    ok = all(got[n] == (w, w) for n, w in expected.items())
    report("index-equality", ok, ", ".join(f"{n} {d}/{f}" for n, (d, f) in got.items()))


def test_negative_control():
    rep = fredholm_check_regular(gallery.get("diagonal-decay").tower((16, 32, 64)))
    ratio = rep.sigma_gaps[0] / rep.sigma_gaps[-1]
    ok = (not rep.is_fredholm) and (not rep.closed_range) and ratio >= 10
    report("negative-control", ok,
           f"is_fredholm {rep.is_fredholm}, closed_range {rep.closed_range}, "
           f"sigma_gap {rep.sigma_gaps[0]:.4g} -> {rep.sigma_gaps[-1]:.4g} (shrink {ratio:.2f}x, need >= 10x)")


def test_index_zero_decomposition():
    dec = compact_plus_invertible(gallery.get("diagonal-n").tower((16, 32)))
    smin, rec = min(dec.V_min_sigma), max(dec.reconstruction_residual)
    ok = dec.invertible and smin >= 0.5 and dec.K_rank == [1, 1] and rec <= 1e-12
    report("index-zero-decomposition", ok, f"V min sigma {smin:.3f}, K ranks {dec.K_rank}, reconstruction {rec:.1e}")


def test_cli_contract(tmp_path):
    manifest = json.loads((ROOT / "scenarios" / "manifest.json").read_text())["expected_exit"]
    corpus = ROOT / "scenarios" / "corpus"
    wrong = []
    for name, want in sorted(manifest.items()):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        codes = [cli_main(["analyze", str(corpus / name), "--seed", "11", "--out", str(p)]) for p in (a, b)]
        if codes != [want, want]:
            wrong.append(f"{name}: {codes} != {want}")
        elif a.read_bytes() != b.read_bytes():
            wrong.append(f"{name}: reports differ")
    covered = sorted(set(manifest.values()))
    ok = len(manifest) >= 10 and covered == [0, 1, 2, 3] and not wrong
    report("cli-contract", ok, f"{len(manifest)} scenarios, exit codes {covered}, problems {wrong}")


if __name__ == "__main__":
    import subprocess

    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q", "--rootdir", str(ROOT)]))
