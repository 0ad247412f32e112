import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tfbounds.signals import AxisGrid, DEFAULT_GRID

settings.register_profile(
    "tfbounds", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("tfbounds")


@pytest.fixture
def grid():
    return DEFAULT_GRID


@pytest.fixture
def small_grid():
    return AxisGrid(64, 1.0 / 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the terminal summary lists them all."""

    def record(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _CRITERIA.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
