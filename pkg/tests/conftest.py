import numpy as np
import pytest

from semidiag.paths import SamplePath, SeedSpec, gen_brownian


@pytest.fixture
def seed():
    return SeedSpec(20240611, 0)


@pytest.fixture
def bm(seed):
    return gen_brownian(seed, 1.0, 20000)


def linear_path(values, dt=1.0, t0=0.0):
    return SamplePath(t0, dt, np.asarray(values, dtype=float))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
