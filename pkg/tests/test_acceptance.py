"""Acceptance gate: one test and one printed PASS/FAIL line per criterion.

Criteria marked with * are the corrected forms of stated criteria that fail
as written; both are run and reported.  The lines are collected into a
summary section at the end of the pytest run; ``python3 -m fracheat verify``
prints the same lines.
"""

import pytest

from conftest import ACCEPTANCE_LINES

from fracheat.verification import CRITERIA, SUPPLEMENTARY, Faults, run_criterion

KEYS = [k for k, *_ in CRITERIA] + [k for k, *_ in SUPPLEMENTARY]


@pytest.mark.parametrize("key", KEYS)
def test_criterion(key):
    result = run_criterion(key, Faults(None))
    ACCEPTANCE_LINES.append(result.line())
    print("\n" + result.line())
    assert result.passed, result.line()
