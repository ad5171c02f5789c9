import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from helpers import ACCEPTANCE
    except ImportError:
        return
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
