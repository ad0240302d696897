"""Scenario files: validation and execution.

A scenario is a JSON object::

    {"name": "shift-1", "d": 2, "levels": [16, 32],
     "generator": {"kind": "weighted_shift", "step": 1},
     "tolerances": {"tol_rank": 1e-8, "tol_residual": 1e-10},
     "checks": ["fredholm", "transform"],
     "expect": {"is_fredholm": true, "index": -1}, "seed": 0}

Only ``generator`` and ``checks`` are required.  Validation errors are raised
as :class:`SchemaError` whose message starts with the dotted path of the
offending field.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import __version__, linalg
from .errors import DefectSingular, DomainError, IndexNonzero, NotFredholm, SchemaError
from .fredholm import TOL_RANK, compact_plus_invertible, fredholm_check_regular, jsonable
from .operators import adjoint, psi, psi_inverse
from .regular import bounded_transform, defect_floor, round_trip_residual, verify_kernel_range_identities
from .towers import DEFAULT_LEVELS, OperatorTower, parse_generator

CHECKS = ("fredholm", "transform", "lemma42", "psi", "decompose")
TOL_RESIDUAL = 1e-10
ROUND_TRIP_TOL = 1e-8

# numerical breakdowns map to exit 3
BREAKDOWN = (DefectSingular, DomainError, np.linalg.LinAlgError, FloatingPointError)

SCHEMA = {
    "type": "object",
    "required": ["generator", "checks"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "d": {"type": "integer", "minimum": 1},
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2},
        "generator": {"type": "object"},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol_rank": {"type": "number", "minimum": 0},
                "tol_residual": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "checks": {"type": "array", "items": {"enum": list(CHECKS)}, "minItems": 1, "uniqueItems": True},
        "expect": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "is_fredholm": {"type": "boolean"},
                "index": {"type": ["integer", "null"]},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _path(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = err.message.split("'")[1]
        parts.append(missing)
    elif err.validator == "additionalProperties" and "'" in err.message:
        parts.append(err.message.split("'")[1])
    return ".".join(parts) or "<root>"


@dataclass
class Scenario:
    generator: dict
    checks: list
    name: str = "unnamed"
    d: int = 2
    levels: tuple = DEFAULT_LEVELS
    tol_rank: float = TOL_RANK
    tol_residual: float = TOL_RESIDUAL
    expect: dict = field(default_factory=dict)
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    def tower(self) -> OperatorTower:
        return OperatorTower(parse_generator(self.generator), self.levels, self.d)

    def echo(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "levels": list(self.levels),
            "generator": self.generator,
            "tolerances": {"tol_rank": self.tol_rank, "tol_residual": self.tol_residual},
            "checks": list(self.checks),
            "expect": self.expect,
            "seed": self.seed,
        }


def validate(obj) -> Scenario:
    """Check a decoded scenario object and build a :class:`Scenario`."""
    errors = sorted(_VALIDATOR.iter_errors(obj), key=lambda e: (list(e.absolute_path), e.validator))
    if errors:
        e = errors[0]
        raise SchemaError(_path(e), e.message)
    levels = obj.get("levels", list(DEFAULT_LEVELS))
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise SchemaError("levels", f"must be strictly increasing, got {levels}")
    parse_generator(obj["generator"])  # raises SchemaError with a dotted path
    tol = obj.get("tolerances", {})
    return Scenario(
        generator=obj["generator"],
        checks=list(obj["checks"]),
        name=obj.get("name", "unnamed"),
        d=obj.get("d", 2),
        levels=tuple(levels),
        tol_rank=float(tol.get("tol_rank", TOL_RANK)),
        tol_residual=float(tol.get("tol_residual", TOL_RESIDUAL)),
        expect=dict(obj.get("expect", {})),
        seed=obj.get("seed", 0),
        raw=obj,
    )


def load(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("<json>", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise SchemaError("<file>", str(exc)) from None
    return validate(obj)


# --- checks -----------------------------------------------------------------

def check_fredholm(sc: Scenario, t: OperatorTower) -> dict:
    rep = fredholm_check_regular(t, sc.tol_rank)
    passed = rep.atkinson_agrees and not rep.disagreements
    notes = []
    if not rep.atkinson_agrees:
        notes.append("criterion and pseudo-inverse verdicts differ")
    if rep.disagreements:
        notes.append("direct and transform paths disagree")
    if "is_fredholm" in sc.expect and sc.expect["is_fredholm"] != rep.is_fredholm:
        passed = False
        notes.append(f"expected is_fredholm={sc.expect['is_fredholm']}")
    if "index" in sc.expect and sc.expect["index"] != rep.index:
        passed = False
        notes.append(f"expected index={sc.expect['index']}")
    return {"passed": passed, "notes": notes, "report": rep.to_json()}


def check_transform(sc: Scenario, t: OperatorTower) -> dict:
    res = bounded_transform(t)
    rt = round_trip_residual(t)
    rt_tol = max(ROUND_TRIP_TOL, sc.tol_residual)
    passed = (res.norm_ok and max(res.adjoint_residual) <= sc.tol_residual
              and max(res.defect_residual) <= sc.tol_residual and max(rt) <= rt_tol)
    return {
        "passed": passed,
        "levels": res.levels,
        "norm_F": res.norm_F,
        "adjoint_residual": res.adjoint_residual,
        "defect_residual": res.defect_residual,
        "round_trip_residual": rt,
        "round_trip_tol": rt_tol,
        "defect_floor": defect_floor(t),
    }


def check_kernel_range(sc: Scenario, t: OperatorTower) -> dict:
    rep = verify_kernel_range_identities(t, sc.tol_rank or 1e-8, sc.tol_residual)
    return {
        "passed": rep.stable,
        "max_residual": rep.max_residual(),
        "dims": rep.dims,
        "dims_stable": rep.dims_stable,
        "residuals": {
            "ker_t_vs_ker_F": rep.ker_t_vs_ker_F,
            "ker_t_adj_vs_ker_F_adj": rep.ker_ts_vs_ker_Fs,
            "ran_t_vs_ran_F": rep.ran_t_vs_ran_F,
            "ran_t_adj_vs_ran_F_adj": rep.ran_ts_vs_ran_Fs,
            "ker_t_adj_vs_ran_t_perp": rep.ker_ts_vs_ran_t_perp,
            "ker_t_vs_ran_t_adj_perp": rep.ker_t_vs_ran_ts_perp,
        },
    }


def check_psi(sc: Scenario, t: OperatorTower) -> dict:
    """Localization identities for the first-level operator at a seeded basepoint."""
    from .suites import random_minimal_projection, random_operator

    rng = np.random.default_rng(sc.seed)
    T = t.level(t.levels[0])
    S = random_operator(rng, T.dim_h, T.dim_m)
    e0 = random_minimal_projection(rng, T.dim_h)
    PT, PS = psi(T, e0), psi(S, e0)
    scale = max(1.0, T.norm()) * max(1.0, S.norm())
    res = {
        "homomorphism": linalg.opnorm(psi(T @ S, e0) - PT @ PS) / scale,
        "star": linalg.opnorm(psi(adjoint(T), e0) - PT.conj().T) / max(1.0, T.norm()),
        "isometry": abs(linalg.opnorm(PT) - T.norm()) / max(1.0, T.norm()),
        "round_trip": linalg.opnorm(psi_inverse(PT, e0).right_mult - T.right_mult) / max(1.0, T.norm()),
    }
    return {"passed": max(res.values()) <= sc.tol_residual, "level": t.levels[0], "relative_residuals": res}


def check_decompose(sc: Scenario, t: OperatorTower) -> dict:
    try:
        dec = compact_plus_invertible(t, tol_rank=sc.tol_rank)
    except (NotFredholm, IndexNonzero) as exc:
        return {"passed": False, "error": type(exc).__name__, "message": str(exc)}
    stable_rank = all(r == dec.K_rank[0] for r in dec.K_rank)
    passed = dec.invertible and stable_rank and max(dec.reconstruction_residual) <= sc.tol_residual
    return {
        "passed": passed,
        "V_invertible": dec.invertible,
        "V_min_sigma": dec.V_min_sigma,
        "K_rank": dec.K_rank,
        "K_rank_stable": stable_rank,
        "reconstruction_residual": dec.reconstruction_residual,
    }


RUNNERS = {
    "fredholm": check_fredholm,
    "transform": check_transform,
    "lemma42": check_kernel_range,
    "psi": check_psi,
    "decompose": check_decompose,
}


def run_scenario(sc: Scenario, timing: bool = False) -> dict:
    """Run every requested check; breakdowns propagate to the caller."""
    start = time.perf_counter()
    t = sc.tower()
    results = {name: RUNNERS[name](sc, t) for name in sc.checks}
    report = {
        "tool": "kfredholm",
        "version": __version__,
        "seed": sc.seed,
        "scenario": sc.echo(),
        "results": results,
        "passed": all(r["passed"] for r in results.values()),
        "status": "ok",
    }
    if timing:
        report["wall_time_s"] = time.perf_counter() - start
    return jsonable(report)


def error_report(path: str, status: str, exc: Exception, seed=None) -> dict:
    return {
        "tool": "kfredholm",
        "version": __version__,
        "seed": seed,
        "file": str(path),
        "passed": False,
        "status": status,
        "error": type(exc).__name__,
        "message": str(exc),
    }
