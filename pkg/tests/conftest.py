import os
import sys

import mpmath
import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def hiprec():
    """Run the test body at 256 bits so comparisons do not round to doubles."""
    with mpmath.workprec(256):
        yield


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
