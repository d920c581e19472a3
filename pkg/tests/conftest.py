import math

import pytest
from hypothesis import HealthCheck, settings

from leo_outage.config import PRESETS

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def vsat():
    return PRESETS["vsat-table1"]


@pytest.fixture
def handheld():
    return PRESETS["handheld-table1"]


@pytest.fixture
def deg():
    return math.radians
