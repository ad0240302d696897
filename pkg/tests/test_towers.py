import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kfredholm.errors import DomainError, SchemaError
from kfredholm.towers import (
    Diagonal, FiniteRank, OperatorTower, Product, Sum, Symbol, WeightedShift, consistency_defect, parse_generator,
)

GENERATORS = [
    {"kind": "weighted_shift", "step": 1},
    {"kind": "weighted_shift", "step": -2, "weights": "sqrt(n)"},
    {"kind": "diagonal", "values": "n**2 - 3"},
    {"kind": "finite_rank", "values": [[1, 2], [3, 4]]},
    {"kind": "sum", "terms": [{"kind": "weighted_shift", "step": 1}, {"kind": "diagonal", "values": [1, 2, 3]}]},
    {"kind": "product", "terms": [{"kind": "weighted_shift", "step": 1, "weights": "n"},
                                  {"kind": "weighted_shift", "step": -1}]},
    {"kind": "adjoint", "terms": [{"kind": "weighted_shift", "step": 2}]},
]


def test_symbol_forms():
    n = np.arange(5)
    assert np.array_equal(Symbol(2)(n), np.full(5, 2.0))
    assert np.allclose(Symbol("1/(n+1)")(n), 1 / (n + 1))
    assert np.array_equal(Symbol([1, 2])(n), [1, 2, 2, 2, 2])
    with pytest.raises(DomainError):
        Symbol("1/(n-2)")(n)
    with pytest.raises(SchemaError):
        Symbol("__import__('os')")
    assert Symbol("n").unbounded and not Symbol("1/(n+1)").unbounded and not Symbol([5, 6]).unbounded


def test_shift_compression_and_section():
    S = WeightedShift(1, Symbol(1))
    assert np.array_equal(S.compression(3), np.eye(3, k=-1))
    sec = S.section(3)
    assert sec.shape == (4, 3) and np.array_equal(sec, np.eye(4, 3, k=-1))


@pytest.mark.parametrize("obj", GENERATORS)
def test_compressions_are_consistent(obj):
    g = parse_generator(obj)
    assert consistency_defect(g, 8, 20) == 0.0
    assert consistency_defect(g.adjoint(), 8, 20) == 0.0
    assert np.allclose(g.adjoint().compression(10), g.compression(10).conj().T)


@pytest.mark.parametrize("obj", GENERATORS)
def test_json_round_trip(obj):
    g = parse_generator(obj)
    g2 = parse_generator(g.to_json())
    assert np.array_equal(g.compression(12), g2.compression(12))


def test_product_matches_matrix_product():
    A, B = WeightedShift(1, Symbol("n")), WeightedShift(-1, Symbol(1))
    P = Product((A, B))
    N = 10
    big = A.compression(3 * N) @ B.compression(3 * N)
    assert np.allclose(P.compression(N), big[:N, :N])
    assert np.allclose(P.section(N), (A.compression(3 * N) @ B.compression(3 * N))[: N + P.lower, :N])


def test_finite_rank_bands():
    F = FiniteRank(np.array([[0, 0, 1], [0, 0, 0], [2, 0, 0]]))
    assert F.lower == 2 and F.upper == 2
    assert Sum((WeightedShift(3, Symbol(1)), F)).lower == 3


def test_tower_levels_validation():
    with pytest.raises(ValueError):
        OperatorTower(Diagonal(Symbol(1)), (32, 16))
    t = OperatorTower(Diagonal(Symbol("n")), (4, 8))
    assert t.unbounded and t.level(4).dim_m == 4


@pytest.mark.parametrize("obj, field", [
    ({"kind": "nope"}, "generator.kind"),
    ({"kind": "weighted_shift", "step": 1.5}, "generator.step"),
    ({"kind": "diagonal"}, "generator.values"),
    ({"kind": "sum", "terms": [{"kind": "diagonal", "values": "m"}]}, "generator.terms[0].values"),
    ({"kind": "sum", "terms": []}, "generator.terms"),
])
def test_schema_errors_name_the_field(obj, field):
    with pytest.raises(SchemaError) as exc:
        parse_generator(obj)
    assert exc.value.field == field


@given(st.integers(-3, 3), st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.integers(1, 12))
def test_section_extends_compression(step, weights, N):
    g = WeightedShift(step, Symbol(weights))
    sec = g.section(N)
    assert np.array_equal(sec[:N], g.compression(N))
    assert np.array_equal(sec, g.compression(N + g.lower)[:, :N])
