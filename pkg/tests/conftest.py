"""Shared test plumbing: collect acceptance-criterion lines for the summary.

Each acceptance test records exactly one PASS/FAIL line; printing them in the
terminal-summary section keeps them visible even under captured output.
"""

import pytest

_LINES = []


@pytest.fixture(scope="session")
def acceptance_lines():
    return _LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
