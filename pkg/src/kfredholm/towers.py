"""Truncation towers for operators on the infinite module K(H)^(infinity).

A generator describes an infinite banded matrix ``t`` acting on coordinate
sequences (the localized picture).  Two finite views are produced:

``compression(N)``
    ``P_N t P_N``, the N x N corner.  Consistent across levels by design and
    used wherever the square operator T_N on the d x N module is meant.
``section(N)``
    ``t P_N`` restricted to the rows it can reach, an ``(N + lower) x N``
    matrix.  This is the exact restriction of t to the first N coordinates,
    so its kernel is exactly ``Ker t`` intersected with that subspace.  Kernel,
    cokernel and pseudo-inverse decisions are made on sections, which avoids
    the boundary column that makes every square corner of a shift look like
    an index-0 operator.

Weighted shifts use the convention that the entry coupling coordinates i and j
carries the weight ``w(max(i, j))``; with step 0 this is the diagonal
``g(n)``, and the adjoint of a step-k shift is the step -k shift with the
conjugate symbol.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError, SchemaError
from .module import matrix_from_json, matrix_to_json
from .operators import AdjointableOp

DEFAULT_LEVELS = (16, 32)

_FUNCS = {"sqrt": np.sqrt}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.true_divide,
    ast.Pow: np.power,
}


def _compile_expr(text: str, where: str):
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise SchemaError(where, f"cannot parse symbol {text!r}") from exc

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            v = float(node.value)
            return lambda n: np.full(n.shape, v)
        if isinstance(node, ast.Name) and node.id == "n":
            return lambda n: n.astype(float)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda n: sign * inner(n)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = build(node.left), build(node.right)
            return lambda n: op(left(n), right(n))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            fn, arg = _FUNCS[node.func.id], build(node.args[0])
            return lambda n: fn(arg(n))
        raise SchemaError(where, f"unsupported construct in symbol {text!r}")

    return build(tree)


@dataclass(frozen=True, eq=False)
class Symbol:
    """A real sequence w(n), n = 0, 1, 2, ...

    Accepted forms: a number (constant), an expression in ``n`` built from
    numbers, ``+ - * / **`` and ``sqrt`` (covers polynomials, ``sqrt(n)``,
    ``1/(n+1)``), or an explicit list whose last entry repeats forever.
    """

    spec: object
    where: str = "weights"
    _fn: object = field(default=None, repr=False)

    def __post_init__(self):
        s = self.spec
        if isinstance(s, bool):
            raise SchemaError(self.where, "boolean is not a symbol")
        if isinstance(s, (int, float)):
            v = float(s)
            if not math.isfinite(v):
                raise SchemaError(self.where, "symbol constant must be finite")
            fn = lambda n: np.full(n.shape, v)
        elif isinstance(s, str):
            fn = _compile_expr(s, self.where)
        elif isinstance(s, (list, tuple)):
            vals = np.asarray(s, dtype=float) if len(s) else None
            if vals is None or vals.ndim != 1 or not np.all(np.isfinite(vals)):
                raise SchemaError(self.where, "explicit weights must be a nonempty list of finite numbers")
            fn = lambda n: vals[np.minimum(n, vals.size - 1)]
        else:
            raise SchemaError(self.where, f"unsupported symbol {s!r}")
        object.__setattr__(self, "_fn", fn)

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        with np.errstate(all="ignore"):
            v = np.asarray(self._fn(n), dtype=float)
        if not np.all(np.isfinite(v)):
            bad = n[~np.isfinite(v)]
            raise DomainError(f"symbol {self.spec!r} is not finite at n = {bad[:5].tolist()}")
        return v

    @property
    def unbounded(self) -> bool:
        """Heuristic growth test: |w(1e12)| >= 10 max(1, |w(1e6)|)."""
        if isinstance(self.spec, (list, tuple, int, float)):
            return False
        with np.errstate(all="ignore"):
            big = np.abs(np.asarray(self._fn(np.array([10**6, 10**12])), dtype=float))
        if not np.all(np.isfinite(big)):
            return True
        return bool(big[1] >= 10.0 * max(1.0, big[0]))

    def to_json(self):
        return list(self.spec) if isinstance(self.spec, tuple) else self.spec


class Generator:
    """Symbolic rule for an infinite banded matrix."""

    lower: int  # max i - j over nonzero entries
    upper: int  # max j - i over nonzero entries

    def compression(self, N: int) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self) -> "Generator":
        return Adjoint(self)

    @property
    def unbounded(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise NotImplementedError

    def section(self, N: int) -> np.ndarray:
        """Exact restriction ``t P_N`` as an ``(N + lower) x N`` matrix."""
        return self.compression(N + self.lower)[:, :N]


@dataclass(frozen=True, eq=False)
class WeightedShift(Generator):
    step: int
    weights: Symbol

    @property
    def lower(self):
        return max(self.step, 0)

    @property
    def upper(self):
        return max(-self.step, 0)

    def compression(self, N):
        A = np.zeros((N, N), dtype=np.complex128)
        k = self.step
        if abs(k) >= N:
            return A
        j = np.arange(max(0, -k), min(N, N - k))
        i = j + k
        A[i, j] = self.weights(np.maximum(i, j))
        return A

    def adjoint(self):
        # real symbols, so conjugation leaves them unchanged
        return WeightedShift(-self.step, self.weights)

    @property
    def unbounded(self):
        return self.weights.unbounded

    def to_json(self):
        return {"kind": "weighted_shift", "step": self.step, "weights": self.weights.to_json()}


@dataclass(frozen=True, eq=False)
class Diagonal(Generator):
    values: Symbol
    lower = 0
    upper = 0

    def compression(self, N):
        return np.diag(self.values(np.arange(N))).astype(np.complex128)

    def adjoint(self):
        return self

    @property
    def unbounded(self):
        return self.values.unbounded

    def to_json(self):
        return {"kind": "diagonal", "values": self.values.to_json()}


@dataclass(frozen=True, eq=False)
class FiniteRank(Generator):
    """An explicit r x c block in the top-left corner, zero elsewhere."""

    block: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "block", linalg.frozen(linalg.as_matrix(self.block, "finite_rank block")))

    @property
    def lower(self):
        i, j = np.nonzero(self.block)
        return int(max(0, (i - j).max())) if i.size else 0

    @property
    def upper(self):
        i, j = np.nonzero(self.block)
        return int(max(0, (j - i).max())) if i.size else 0

    def compression(self, N):
        A = np.zeros((N, N), dtype=np.complex128)
        r, c = min(N, self.block.shape[0]), min(N, self.block.shape[1])
        A[:r, :c] = self.block[:r, :c]
        return A

    def adjoint(self):
        return FiniteRank(self.block.conj().T)

    def to_json(self):
        return {"kind": "finite_rank", "values": matrix_to_json(self.block)}


@dataclass(frozen=True, eq=False)
class Sum(Generator):
    terms: tuple

    @property
    def lower(self):
        return max(t.lower for t in self.terms)

    @property
    def upper(self):
        return max(t.upper for t in self.terms)

    def compression(self, N):
        return sum(t.compression(N) for t in self.terms)

    def adjoint(self):
        return Sum(tuple(t.adjoint() for t in self.terms))

    @property
    def unbounded(self):
        return any(t.unbounded for t in self.terms)

    def to_json(self):
        return {"kind": "sum", "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True, eq=False)
class Product(Generator):
    """``terms[0] terms[1] ... terms[-1]`` as level-wise composition.

    Products of regular operators need not be regular; towers built this way
    are diagnostics at fixed truncation.
    """

    terms: tuple

    @property
    def lower(self):
        return sum(t.lower for t in self.terms)

    @property
    def upper(self):
        return sum(t.upper for t in self.terms)

    def compression(self, N):
        # P_N t s P_N = (P_N t P_K)(P_K s P_N) exactly once K >= N + lower(s)
        head, tail = self.terms[0], self.terms[1:]
        if not tail:
            return head.compression(N)
        rest = tail[0] if len(tail) == 1 else Product(tail)
        K = N + rest.lower
        return head.compression(K)[:N, :] @ rest.compression(K)[:, :N]

    def adjoint(self):
        return Product(tuple(t.adjoint() for t in reversed(self.terms)))

    @property
    def unbounded(self):
        return any(t.unbounded for t in self.terms)

    def to_json(self):
        return {"kind": "product", "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True, eq=False)
class Adjoint(Generator):
    """Adjoint computed entrywise (conjugate transpose of each compression)."""

    term: Generator

    @property
    def lower(self):
        return self.term.upper

    @property
    def upper(self):
        return self.term.lower

    def compression(self, N):
        return self.term.compression(N).conj().T

    def adjoint(self):
        return self.term

    @property
    def unbounded(self):
        return self.term.unbounded

    def to_json(self):
        return {"kind": "adjoint", "terms": [self.term.to_json()]}


def bounded_transform_matrix(M: np.ndarray) -> np.ndarray:
    """``M (1 + M* M)^(-1/2)`` for a (possibly rectangular) coordinate matrix."""
    Q = linalg.hermitian_function(M.conj().T @ M, linalg.inv_sqrt_one_plus)
    return M @ Q


@dataclass(frozen=True, eq=False)
class TransformOf(Generator):
    """The bounded transform F_t of a tower, approximated level by level.

    ``compression(N)`` is the N x N corner of the transform of the larger
    corner ``P_M t P_M`` with ``M = N + pad``.  For weighted shifts and
    diagonals (``t* t`` diagonal) and for finite-rank perturbations of shifts
    this is exact once M exceeds N by the bandwidth; in general the error
    decays away from the boundary.  Bands are taken from t.
    """

    base: Generator
    pad: int | None = None

    @property
    def lower(self):
        return self.base.lower

    @property
    def upper(self):
        return self.base.upper

    def compression(self, N):
        M = N + (self.pad if self.pad is not None else max(N, self.base.lower + self.base.upper + 1))
        return bounded_transform_matrix(self.base.compression(M))[:N, :N]

    def adjoint(self):
        return TransformOf(self.base.adjoint(), self.pad)

    def to_json(self):
        return {"kind": "bounded_transform", "terms": [self.base.to_json()]}


KINDS = ("weighted_shift", "diagonal", "finite_rank", "sum", "product", "adjoint")


def _field(obj, key, where):
    if key not in obj:
        raise SchemaError(f"{where}.{key}", "missing")
    return obj[key]


def parse_generator(obj, where: str = "generator") -> Generator:
    """Build a generator from its JSON description."""
    if not isinstance(obj, dict):
        raise SchemaError(where, "must be an object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"{where}.kind", f"must be one of {', '.join(KINDS)}; got {kind!r}")
    if kind == "weighted_shift":
        step = obj.get("step", 1)
        if isinstance(step, bool) or not isinstance(step, int):
            raise SchemaError(f"{where}.step", "must be an integer")
        return WeightedShift(step, Symbol(obj.get("weights", 1), f"{where}.weights"))
    if kind == "diagonal":
        key = "weights" if "weights" in obj and "values" not in obj else "values"
        return Diagonal(Symbol(_field(obj, key, where), f"{where}.{key}"))
    if kind == "finite_rank":
        vals = _field(obj, "values", where)
        try:
            if isinstance(vals, dict):
                block = matrix_from_json(vals)
            else:
                block = linalg.as_matrix(np.asarray(vals, dtype=float))
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{where}.values", str(exc)) from exc
        return FiniteRank(block)
    terms = _field(obj, "terms", where)
    if not isinstance(terms, list) or not terms:
        raise SchemaError(f"{where}.terms", "must be a nonempty list")
    parsed = tuple(parse_generator(t, f"{where}.terms[{i}]") for i, t in enumerate(terms))
    if kind == "sum":
        return Sum(parsed)
    if kind == "product":
        return Product(parsed)
    if len(parsed) != 1:
        raise SchemaError(f"{where}.terms", "adjoint takes exactly one term")
    return Adjoint(parsed[0])


@dataclass(frozen=True, eq=False)
class OperatorTower:
    """A generator together with the truncation levels it is examined at."""

    generator: Generator
    levels: tuple = DEFAULT_LEVELS
    dim_h: int = 2

    def __post_init__(self):
        levels = tuple(int(n) for n in self.levels)
        if not levels or any(n < 1 for n in levels) or any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be positive and strictly increasing, got {levels}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_json(cls, obj, levels=DEFAULT_LEVELS, dim_h=2):
        return cls(parse_generator(obj), levels, dim_h)

    @property
    def unbounded(self) -> bool:
        return self.generator.unbounded

    @property
    def lower(self):
        return self.generator.lower

    @property
    def upper(self):
        return self.generator.upper

    def compression(self, N) -> np.ndarray:
        return self.generator.compression(N)

    def section(self, N) -> np.ndarray:
        return self.generator.section(N)

    def level(self, N) -> AdjointableOp:
        """T_N on the d x N module (right multiplier = transpose of the corner)."""
        return AdjointableOp.from_coordinates(self.compression(N), self.dim_h)

    def adjoint(self) -> "OperatorTower":
        return OperatorTower(self.generator.adjoint(), self.levels, self.dim_h)

    def transform(self, pad: int | None = None) -> "OperatorTower":
        return OperatorTower(TransformOf(self.generator, pad), self.levels, self.dim_h)

    def with_levels(self, levels) -> "OperatorTower":
        return OperatorTower(self.generator, tuple(levels), self.dim_h)

    def to_json(self):
        return self.generator.to_json()


def shift(step=1, weights=1) -> Generator:
    return WeightedShift(step, Symbol(weights))


def diagonal(values) -> Generator:
    return Diagonal(Symbol(values, "values"))


def tower(gen: Generator, levels=DEFAULT_LEVELS, dim_h=2) -> OperatorTower:
    return OperatorTower(gen, tuple(levels), dim_h)


def consistency_defect(gen: Generator, N: int, N_big: int) -> float:
    """``max |T_N - (T_{N_big})[:N, :N]|``."""
    return float(np.max(np.abs(gen.compression(N) - gen.compression(N_big)[:N, :N]), initial=0.0))
