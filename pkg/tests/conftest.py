import numpy as np
import pytest

from zetamoments.zeta_engine import find_zeros

# Hybrid windows around t <= 6000 at X = 30 reach about t = 6425.
TABLE_T_MAX = 6800.0


@pytest.fixture(scope="session")
def zeros():
    """All zeros up to t = 6800 from the engine (about 40 s, built once)."""
    return find_zeros(TABLE_T_MAX)


@pytest.fixture(scope="session")
def zeros100():
    return find_zeros(100.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import summary_lines

    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
