"""Acceptance suite: every numbered criterion at its stated tolerance.

Each test prints the criterion's pass/fail line (plus one line per report)
straight to the terminal, then asserts that every non-informational report
passed.  Criteria 6 and 7 are expected to fail; see notes/decisions.md.
"""

from __future__ import annotations

import pytest

from tfbm.validation import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print()
        for line in result.lines():
            print(line)
    failed = [r.to_line() for r in result.reports if not r.passed]
    assert not failed, "\n".join(failed)
