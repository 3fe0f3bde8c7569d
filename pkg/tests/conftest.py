from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from plgroupoid.models import get_model

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def su11():
    return get_model("su11")


@pytest.fixture(scope="session")
def trivial():
    return get_model("trivial")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
