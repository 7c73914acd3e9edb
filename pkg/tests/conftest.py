import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20241016)


def pytest_terminal_summary(terminalreporter):
    from ._report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES):
            terminalreporter.write_line(line)
