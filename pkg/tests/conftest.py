import numpy as np
import pytest

from qcomp.signal_model import RadarConfig

ACCEPTANCE_LINES = []


@pytest.fixture
def cfg():
    return RadarConfig.normalized(256)


@pytest.fixture
def physical_cfg():
    # 24 GHz carrier, 1 ms sampling period
    return RadarConfig(f0=24e9, ts=1e-3, m_samples=256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
