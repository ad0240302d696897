import numpy as np
import pytest
from hypothesis import given

from kfredholm.errors import DimensionMismatch, NotMinimalProjection
from kfredholm.module import (
    CompactElement, ModuleVector, decompose, dim_K, gram_schmidt_module, inner_product, is_basic_vector,
    is_minimal_projection, lift, localize, module_action, module_norm, orthogonal_complement, orthonormal_basis,
    projection_vector, standard_basepoint,
)

from conftest import cmat, module_setup, rand_element, rand_projection, rand_vector


@given(module_setup())
def test_inner_product_axioms(setup):
    rng, d, m = setup
    x, y, z = (rand_vector(rng, d, m) for _ in range(3))
    a = rand_element(rng, d)
    xy, yx = inner_product(x, y).matrix, inner_product(y, x).matrix
    assert np.abs(xy.conj().T - yx).max() <= 1e-12 * max(1, np.abs(xy).max())
    ax = module_action(a, x)
    lhs = inner_product(ax, y).matrix
    assert np.abs(lhs - a.matrix @ xy).max() <= 1e-12 * max(1, np.abs(lhs).max())
    additive = inner_product(x + z, y).matrix - xy - inner_product(z, y).matrix
    assert np.abs(additive).max() <= 1e-12 * max(1, np.abs(xy).max())
    assert np.linalg.eigvalsh(inner_product(x, x).matrix).min() >= -1e-12 * max(1, module_norm(x) ** 2)


@given(module_setup())
def test_localization_is_isometric(setup):
    rng, d, m = setup
    e0 = rand_projection(rng, d)
    x, y = rand_vector(rng, d, m), rand_vector(rng, d, m)
    lx, ly = localize(e0, x), localize(e0, y)
    # (e0 x, e0 y) = tr <e0 x, e0 y>
    e0x, e0y = module_action(e0, x), module_action(e0, y)
    assert lx.inner(ly) == pytest.approx(np.trace(inner_product(e0x, e0y).matrix), abs=1e-10)
    assert np.allclose(lift(e0, lx.coords).matrix, e0x.matrix)


def test_projection_vector_phase_convention():
    u = np.array([0.6j, -0.8j])
    e = CompactElement(np.outer(u, u.conj()))
    v = projection_vector(e)
    assert v[1].imag == 0 and v[1].real > 0
    assert np.allclose(np.outer(v, v.conj()), e.matrix)


def test_rejects_non_minimal_projection():
    assert not is_minimal_projection(CompactElement.identity(2))
    with pytest.raises(NotMinimalProjection):
        localize(CompactElement.identity(2), ModuleVector.zeros(2, 3))


def test_standard_basis_is_orthonormal():
    B = orthonormal_basis(3, 4)
    assert len(B) == 4 and all(is_basic_vector(x) for x in B)
    for i, x in enumerate(B):
        for j, y in enumerate(B):
            ip = inner_product(x, y).matrix
            assert np.allclose(ip, standard_basepoint(3).matrix if i == j else 0)


def test_gram_schmidt_counts_the_generated_submodule(rng):
    d, m = 3, 6
    # a single generic vector generates a submodule of orthonormal dimension min(d, m)
    x = rand_vector(rng, d, m)
    assert dim_K([x]) == 3
    B = gram_schmidt_module([x, x * 2.0])
    assert len(B) == 3
    # the span of B contains x
    p, q = decompose(x, B)
    assert module_norm(q) < 1e-10


def test_orthogonal_complement_fills_up(rng):
    m = 5
    x = ModuleVector(np.outer([1.0, 0.0], cmat(rng, m)))
    inside = gram_schmidt_module([x])
    comp = orthogonal_complement([x])
    assert len(inside) + len(comp) == m
    for a in inside:
        for b in comp:
            assert np.abs(inner_product(a, b).matrix).max() < 1e-12
    assert len(orthogonal_complement([], d=2, m=3)) == 3
    with pytest.raises(DimensionMismatch):
        orthogonal_complement([])


@given(module_setup())
def test_decompose_is_orthogonal(setup):
    rng, d, m = setup
    B = gram_schmidt_module([rand_vector(rng, d, m)])
    x = rand_vector(rng, d, m)
    p, q = decompose(x, B)
    assert np.allclose((p + q).matrix, x.matrix)
    assert np.abs(inner_product(p, q).matrix).max() < 1e-9 * max(1, module_norm(x) ** 2)


def test_json_round_trip(rng):
    x = rand_vector(rng, 2, 3)
    assert np.array_equal(ModuleVector.from_json(x.to_json()).matrix, x.matrix)
    a = rand_element(rng, 3)
    assert np.array_equal(CompactElement.from_json(a.to_json()).matrix, a.matrix)


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        inner_product(ModuleVector.zeros(2, 3), ModuleVector.zeros(2, 4))
    with pytest.raises(DimensionMismatch):
        CompactElement(np.zeros((2, 3)))


@given(module_setup(max_d=4, max_m=8))
def test_orthonormal_dimension_does_not_depend_on_the_basis(setup):
    rng, d, m = setup
    k = int(rng.integers(1, m + 1))
    vs = [ModuleVector(cmat(rng, d, 1) @ cmat(rng, 1, m)) for _ in range(k)]
    counts = {dim_K(vs), dim_K(vs[::-1]), dim_K(vs, e0=rand_projection(rng, d))}
    assert counts == {min(k, m)}
    B = gram_schmidt_module(vs, e0=rand_projection(rng, d))
    assert dim_K(list(B)) == min(k, m)
