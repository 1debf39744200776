import numpy as np
import pytest

from fock_qha.fock_core import BasisTruncation
from fock_qha.quadrature import build_grid


@pytest.fixture(scope="session")
def grid64():
    return build_grid(1, 64)


@pytest.fixture(scope="session")
def grid80():
    return build_grid(1, 80)


@pytest.fixture
def trunc16():
    return BasisTruncation(1, 16)


@pytest.fixture(scope="session")
def sample_points():
    ax = np.linspace(-2, 2, 5)
    return (ax[:, None] + 1j * ax[None, :]).reshape(-1, 1)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
