import pytest

from kfredholm.errors import SchemaError
from kfredholm.scenario import run_scenario, validate

BASE = {"generator": {"kind": "weighted_shift", "step": 1}, "checks": ["fredholm"]}


def test_defaults():
    sc = validate(dict(BASE))
    assert sc.levels == (16, 32) and sc.d == 2 and sc.seed == 0


@pytest.mark.parametrize("patch, field", [
    ({"tolerances": {"tol_rank": -1}}, "tolerances.tol_rank"),
    ({"tolerances": {"tol_residual": 0}}, "tolerances.tol_residual"),
    ({"levels": [16]}, "levels"),
    ({"levels": [16, 16]}, "levels"),
    ({"checks": ["fredholm", "fredholm"]}, "checks"),
    ({"checks": ["nope"]}, "checks.0"),
    ({"d": 0}, "d"),
    ({"extra": 1}, "extra"),
    ({"generator": {"kind": "diagonal", "values": "q"}}, "generator.values"),
])
def test_validation_names_the_field(patch, field):
    obj = dict(BASE)
    obj.update(patch)
    with pytest.raises(SchemaError) as exc:
        validate(obj)
    assert exc.value.field == field
    assert str(exc.value).startswith(field)


def test_missing_required_field():
    with pytest.raises(SchemaError) as exc:
        validate({"checks": ["fredholm"]})
    assert exc.value.field == "generator"


def test_every_check_appears_once():
    sc = validate(dict(BASE, checks=["fredholm", "transform", "lemma42", "psi"], expect={"index": -1}))
    rep = run_scenario(sc)
    assert sorted(rep["results"]) == sorted(sc.checks)
    assert rep["passed"] and rep["seed"] == 0 and "wall_time_s" not in rep
    assert "wall_time_s" in run_scenario(sc, timing=True)


def test_expectation_mismatch_fails():
    rep = run_scenario(validate(dict(BASE, expect={"is_fredholm": False})))
    assert not rep["passed"]
    assert rep["results"]["fredholm"]["notes"]
