import pytest

from womlab.network import degenerate, power_law
from womlab.pricing import MarketParams

ACCEPTANCE_LINES = []


@pytest.fixture
def fig1():
    return power_law(-1.0, 100), MarketParams(1.0, 0.05, 0.9)


@pytest.fixture
def two_friends():
    return degenerate(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
