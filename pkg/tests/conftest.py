import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sspdc import load_crystal  # noqa: E402


@pytest.fixture(scope="session")
def slt():
    return load_crystal("ppslt")


@pytest.fixture(scope="session")
def ln():
    return load_crystal("ppln")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
