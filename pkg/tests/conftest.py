import math

import pytest

SQRT_PI_4 = math.sqrt(math.pi / 4)
SQRT_PI_2 = math.sqrt(math.pi / 2)
CANTOR = 4 + 4j


@pytest.fixture
def cantor_lambda():
    return CANTOR


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
