import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kfredholm import gallery
from kfredholm.errors import DefectSingular, NoPseudoInverse
from kfredholm.operators import AdjointableOp, adjoint
from kfredholm.regular import (
    bounded_transform, check_regularity, defect_floor, inverse_transform, pseudo_inverse_levels,
    pseudo_inverse_regular, round_trip_residual, transform_operator, verify_kernel_range_identities,
)
from kfredholm.towers import Diagonal, OperatorTower, Symbol, WeightedShift

from conftest import cmat, seeds


def test_scalar_transform_closed_form():
    F = gallery.get("scalar-3").tower().transform().compression(16)
    assert np.allclose(F, 3 / np.sqrt(10) * np.eye(16), atol=1e-15)


def test_diagonal_transform_closed_form():
    n = np.arange(20.0)
    F = gallery.get("diagonal-n").tower().transform().compression(20)
    assert np.allclose(F, np.diag(n / np.sqrt(1 + n**2)), atol=1e-14)


def test_weighted_shift_transform_closed_form():
    # t e_{n-1} = n e_n, so t*t = diag((n+1)^2) and F e_{n-1} = n / sqrt(1 + n^2) e_n
    F = gallery.get("weighted-shift-n").tower().transform().section(12)
    n = np.arange(1.0, 13.0)
    assert np.allclose(np.diag(F, -1), n / np.sqrt(1 + n**2), atol=1e-14)
    assert np.abs(F - np.eye(13, 12, k=-1) * np.diag(F, -1)).max() < 1e-14


def test_shift_transform_is_scaled_isometry():
    F = gallery.get("shift-1").tower().transform().section(10)
    assert np.allclose(F, np.eye(11, 10, k=-1) / np.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("entry", gallery.GALLERY, ids=lambda g: g.name)
def test_bounded_transform_identities(entry):
    t = entry.tower()
    res = bounded_transform(t)
    assert res.norm_ok
    assert max(res.adjoint_residual) <= 1e-10
    assert max(res.defect_residual) <= 1e-10
    assert max(round_trip_residual(t)) <= 1e-8
    assert min(defect_floor(t)) > 0


def test_inverse_transform_detects_singular_defect():
    with pytest.raises(DefectSingular):
        inverse_transform(AdjointableOp.identity(1, 3))
    t = OperatorTower(WeightedShift(1, Symbol("1e9*n")), (16, 32))
    with pytest.raises(DefectSingular):
        round_trip_residual(t)


@given(seeds, st.integers(1, 8), st.floats(0.01, 50))
def test_transform_properties(seed, m, scale):
    rng = np.random.default_rng(seed)
    T = AdjointableOp(2, m, scale * cmat(rng, m, m))
    F, Q, D = transform_operator(T)
    assert F.norm() < 1
    Fs, _, _ = transform_operator(adjoint(T))
    assert np.allclose(Fs.right_mult, adjoint(F).right_mult, atol=1e-10)
    assert np.allclose((Q @ Q).right_mult, D.right_mult, atol=1e-10)
    back = inverse_transform(F)
    assert np.linalg.norm(back.right_mult - T.right_mult, 2) <= 1e-8 * max(1, T.norm())


def test_regularity_report():
    rep = check_regularity(gallery.get("weighted-shift-n").tower())
    assert rep.regular and rep.domain_ok
    assert all(m >= 1 for m in rep.min_eig)


@pytest.mark.parametrize("entry", gallery.GALLERY, ids=lambda g: g.name)
def test_kernel_range_identities_hold(entry):
    rep = verify_kernel_range_identities(entry.tower())
    assert rep.stable, rep.max_residual()


def test_kernel_range_dimensions_for_shift():
    rep = verify_kernel_range_identities(gallery.get("shift-2").tower())
    assert rep.dims_stable
    assert rep.dims[0]["ker_t"] == 0 and rep.dims[0]["ker_t_adj"] == 2 and rep.dims[0]["ran_t_perp"] == 2


def test_pseudo_inverses_of_shift():
    pi = pseudo_inverse_regular(gallery.get("shift-2").tower())
    assert pi.left_rank == [0, 0] and pi.right_rank == [2, 2]
    assert max(pi.idempotence_residual) < 1e-12


def test_no_pseudo_inverse_for_decaying_diagonal():
    with pytest.raises(NoPseudoInverse):
        pseudo_inverse_regular(gallery.get("diagonal-decay").tower())
    pi = pseudo_inverse_levels(OperatorTower(Diagonal(Symbol("1/(n+1)")), (16, 32)))
    assert pi.G_norm == pytest.approx([16, 32])
