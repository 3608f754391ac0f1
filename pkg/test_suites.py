#!/usr/bin/env python3
"""
Tests for the verification suites (small trial counts)
"""

import math

import pytest

from leibniz.config import DEFAULT_CONFIG
from leibniz.errors import PreconditionError
from leibniz.suites import SUITES, CheckResult, SuiteReport, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    report = run_suite(name, 3, 1, 1e-9, DEFAULT_CONFIG)
    assert report.passed, [check.to_dict() for check in report.failing()]
    assert report.checks
    assert all(check.trials > 0 for check in report.checks)


def test_suites_are_reproducible():
    first = run_suite("reduction", 4, 2, 1e-9).to_dict()
    second = run_suite("reduction", 4, 2, 1e-9).to_dict()
    assert first == second


def test_nontracial_product_is_reported_not_asserted():
    report = run_suite("nc", 2, 3, 1e-9)
    names = {check.name: check for check in report.checks}
    assert not names["product_nontracial_d2"].asserted
    assert names["product_tracial_d2"].asserted
    assert names["derivation_sup_d3"].trials == 1


def test_frame_columns():
    frame = run_suite("majorization", 2, 1, 1e-9).to_frame()
    assert list(frame.columns) == ["check", "trials", "max_defect", "violations", "asserted"]
    assert len(frame) == 3 * 7


def test_check_result_bookkeeping():
    check = CheckResult("demo", tolerance=0.5)
    check.record(0.25)
    check.record(1.0, instance={"f": [1]})
    check.record(2.0)
    assert check.trials == 3
    assert check.violations == 2
    assert check.max_defect == 2.0
    assert check.detail["first_violation"] == {"f": [1]}
    assert not check.passed

    exploratory = CheckResult("exploratory", asserted=False)
    exploratory.record(math.inf)
    assert exploratory.passed

    report = SuiteReport("demo", 3, 1, 0.5, [check, exploratory])
    assert report.failing() == [check]
    assert report.to_dict()["passed"] is False


def test_run_suite_validation():
    with pytest.raises(PreconditionError):
        run_suite("unknown", 1, 1, 1e-9)
    with pytest.raises(PreconditionError):
        run_suite("scalar", 0, 1, 1e-9)
