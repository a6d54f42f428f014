import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tetgluing.model import enumerate_all  # noqa: E402


@pytest.fixture(scope="session")
def omega1():
    return list(enumerate_all(1))


@pytest.fixture(scope="session")
def omega2():
    return list(enumerate_all(2))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
