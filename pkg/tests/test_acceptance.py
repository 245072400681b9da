"""End-to-end acceptance criteria; each prints one PASS/FAIL line."""

import pytest

from icelab.acceptance import CRITERIA, QUICK, run_criterion


@pytest.mark.parametrize(
    "number",
    [pytest.param(n, marks=() if n in QUICK else pytest.mark.slow, id=f"c{n:02d}") for n in CRITERIA],
)
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
