import json

import pytest

from kfredholm import suites


@pytest.mark.parametrize("name", ["atkinson-bounded", "atkinson-regular", "lemma42", "index-equality"])
def test_small_suites_pass(name):
    res = suites.run_suite(name, seed=3)
    assert res.passed, res.first_failure()


def test_psi_suite_is_deterministic():
    a = suites.psi_isomorphism(seed=7, n_ops=20, n_transfer=10)
    b = suites.psi_isomorphism(seed=7, n_ops=20, n_transfer=10)
    assert a.passed and a.to_csv() == b.to_csv()
    assert a.instances == 30


def test_bounded_transform_suite_small():
    res = suites.bounded_transform_suite(seed=1, n_random=10)
    assert res.passed
    assert res.max_value("norm-F") <= suites.NORM_SLACK


def test_failure_carries_replay_payload():
    res = suites.index_equality()
    res.rows[0] = suites.SuiteRow("forced", "direct-index", 1.0, 0.0, {"generator": {"kind": "diagonal", "values": 1}})
    assert not res.passed
    doc = res.to_json()
    json.dumps(doc)
    assert doc["first_failure"]["instance"] == "forced"
    assert doc["first_failure"]["replay"]["generator"]["kind"] == "diagonal"


def test_summary_table_has_one_row_per_check():
    res = suites.kernel_range_suite()
    lines = res.summary_csv().strip().splitlines()
    assert lines[0].startswith("suite,seed,check")
    assert len(lines) == 1 + 6
