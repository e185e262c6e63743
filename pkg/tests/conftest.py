import pytest

from closeness.distributions import RngStream

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def stream():
    return RngStream(20240917)


@pytest.fixture
def gen():
    return RngStream(7).generator()
