"""Runs every acceptance criterion at its stated tolerance; one line per criterion."""
import pytest

from prcircuits import acceptance

from conftest import ACCEPTANCE_LINES

SLOW = {7, 8, 9, 10, 11, 12, 13}


@pytest.mark.parametrize(
    "number",
    [pytest.param(c.number, marks=pytest.mark.slow) if c.number in SLOW else c.number for c in acceptance.CRITERIA],
    ids=lambda n: f"criterion_{n:02d}",
)
def test_criterion(number):
    res = acceptance.run_criterion(number)
    line = res.line()
    for note in res.notes:
        line += f"\n       note: {note}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.passed, line
