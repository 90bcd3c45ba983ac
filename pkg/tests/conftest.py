import random

import pytest

from gridperm.grid import monotone_matrix


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def cyc2():
    return monotone_matrix(["+ +", "+ +"])


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
