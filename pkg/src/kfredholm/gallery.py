"""Built-in towers with known answers.

Expected verdicts come from the structure of each operator (explicit kernels
of t and t*); ``tests/test_gallery.py`` re-derives every one of them with the
Fredholm machinery at two levels.
"""
from __future__ import annotations

from dataclasses import dataclass

from .towers import DEFAULT_LEVELS, OperatorTower, parse_generator

# 0.25 (u1 v1^T + u2 v2^T) with u1 = (1,0,-1,2), v1 = (0,1,1,0), u2 = (0,2,1,-1), v2 = (1,0,0,1)
_RANK2_BLOCK = [
    [0.0, 0.25, 0.25, 0.0],
    [0.5, 0.0, 0.0, 0.5],
    [0.25, -0.25, -0.25, 0.25],
    [-0.25, 0.5, 0.5, -0.25],
]


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    description: str
    generator: dict
    is_fredholm: bool
    index: int | None
    provenance: str
    unbounded: bool = False

    def tower(self, levels=DEFAULT_LEVELS, dim_h=2) -> OperatorTower:
        return OperatorTower(parse_generator(self.generator), tuple(levels), dim_h)

    def to_json(self):
        return {
            "name": self.name,
            "description": self.description,
            "generator": self.generator,
            "expected": {"is_fredholm": self.is_fredholm, "index": self.index},
            "unbounded": self.unbounded,
            "provenance": self.provenance,
        }


def _shift(k, w=1):
    return {"kind": "weighted_shift", "step": k, "weights": w}


GALLERY = (
    GalleryEntry("shift-1", "unilateral shift e_n -> e_{n+1}", _shift(1), True, -1,
                 "derived: Ker t = 0, Ker t* = span(e_0)"),
    GalleryEntry("shift-2", "shift by two places", _shift(2), True, -2,
                 "derived: Ker t* = span(e_0, e_1)"),
    GalleryEntry("shift-3", "shift by three places", _shift(3), True, -3,
                 "derived: Ker t* = span(e_0, e_1, e_2)"),
    GalleryEntry("left-shift-1", "backward shift, adjoint of shift-1", _shift(-1), True, 1,
                 "derived: index(t*) = -index(t)"),
    GalleryEntry("diagonal-n", "unbounded diagonal g(n) = n", {"kind": "diagonal", "values": "n"}, True, 0,
                 "derived: Ker t = Ker t* = span(e_0)", unbounded=True),
    GalleryEntry("diagonal-decay", "compact diagonal g(n) = 1/(n+1)", {"kind": "diagonal", "values": "1/(n+1)"},
                 False, None, "derived: range not closed, smallest singular value 1/N"),
    GalleryEntry("diagonal-zero", "zero operator on the infinite module", {"kind": "diagonal", "values": 0},
                 False, None, "derived: kernel dimension N at level N"),
    GalleryEntry("finite-rank-perturbed-shift", "shift plus a fixed rank-2 block on the first four coordinates",
                 {"kind": "sum", "terms": [_shift(1), {"kind": "finite_rank", "values": _RANK2_BLOCK}]},
                 True, -1, "derived: compact perturbation keeps the shift index"),
    GalleryEntry("weighted-shift-n", "unbounded weighted shift, weight n on e_{n-1} -> e_n", _shift(1, "n"),
                 True, -1, "derived: weights never vanish, Ker t* = span(e_0)", unbounded=True),
    GalleryEntry("creation-sqrt-n", "creation operator, weight sqrt(n)", _shift(1, "sqrt(n)"), True, -1,
                 "derived: weights never vanish, Ker t* = span(e_0)", unbounded=True),
    GalleryEntry("scalar-3", "constant diagonal 3", {"kind": "diagonal", "values": 3}, True, 0,
                 "trivial: invertible, F = 3/sqrt(10)"),
    GalleryEntry("identity", "identity", {"kind": "diagonal", "values": 1}, True, 0, "trivial: invertible"),
    GalleryEntry("shift-1-times-shift-2", "composition of shift-1 and shift-2",
                 {"kind": "product", "terms": [_shift(1), _shift(2)]}, True, -3,
                 "derived: index adds under composition"),
)

BY_NAME = {g.name: g for g in GALLERY}


def get(name: str) -> GalleryEntry:
    return BY_NAME[name]
