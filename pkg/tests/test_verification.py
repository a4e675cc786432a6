import json

import pytest

from fracheat.verification import CRITERIA, SUPPLEMENTARY, CheckResult, Faults, run_criterion, run_properties


def test_check_result_line_format():
    r = CheckResult("7 decay", True, "fine", 0.5, 5.0, {})
    assert r.line() == "[PASS] 7 decay: fine (0.5s/5s)"
    json.dumps(r.to_dict())


def test_faults_are_off_without_seed():
    f = Faults(None)
    assert f(1.25) == 1.25 and f.shift(0.0, 1.0) == 0.0


def test_faults_perturb_by_at_least_one_percent():
    f = Faults(5)
    assert abs(f(1.0) - 1.0) >= 1e-2


@pytest.mark.parametrize("key", [k for k, *_ in CRITERIA + SUPPLEMENTARY if k != "10"])
def test_fault_injection_breaks_every_criterion(key):
    # a corrupted oracle must turn every criterion red
    assert not run_criterion(key, Faults(11)).passed


def test_fault_injection_breaks_property_suites():
    assert not any(r.passed for r in run_properties(Faults(3)))


def test_criteria_keys_are_unique():
    keys = [c[0] for c in CRITERIA]
    assert len(keys) == len(set(keys))
