"""Acceptance gate: the nine criteria at their stated tolerances and budgets.

Each test prints one PASS/FAIL line, visible without ``-s``.
"""

import time

import pytest

from pcurv import verify

# criterion -> (check, runtime budget in seconds)
CRITERIA = {
    1: ("path operator closed forms", 1.0),
    2: ("p=2 reduction", 1.0),
    3: ("nonnegative curvature at p=3, 4", 30.0),
    4: ("divergence for 1<p<2", 10.0),
    5: ("star leaf exact values", 60.0),
    6: ("solver vs grid oracle", 300.0),
    7: ("product identities", 5.0),
    8: ("invariance suite", 5.0),
    9: ("gradient check", 1.0),
}


@pytest.mark.parametrize("number", list(CRITERIA))
def test_criterion(number, capsys):
    title, budget = CRITERIA[number]
    t0 = time.perf_counter()
    result = verify.CHECKS[number]()
    elapsed = time.perf_counter() - t0
    in_budget = elapsed < budget
    ok = result.passed and in_budget
    with capsys.disabled():
        print(
            f"\ncriterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {result.detail}; "
            f"{elapsed:.2f} s of {budget:g} s"
        )
    assert result.passed, result.detail
    assert in_budget, f"took {elapsed:.2f} s, budget {budget:g} s"
