import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mnbesov.grid import Grid
from mnbesov.littlewood_paley import build_filter_bank

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid2():
    return Grid.cube(2, 64)


@pytest.fixture(scope="session")
def bank2(grid2):
    return build_filter_bank(grid2)


@pytest.fixture(scope="session")
def grid3():
    return Grid.cube(3, 16)


@pytest.fixture(scope="session")
def bank3(grid3):
    return build_filter_bank(grid3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fourier_series(grid, modes):
    """Real field ``sum a cos(k.x) + b sin(k.x)`` from ``{k: (a, b)}`` with integer k."""
    out = np.zeros(grid.n)
    for k, (a, b) in modes.items():
        arg = sum(2 * math.pi * ki / L * x for ki, L, x in zip(k, grid.L, grid.coords))
        out = out + a * np.cos(arg) + b * np.sin(arg)
    return out


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    """Collects one PASS/FAIL line per acceptance criterion."""
    if not hasattr(pytestconfig, "_acceptance_lines"):
        pytestconfig._acceptance_lines = []
    return pytestconfig._acceptance_lines


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
