import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tcpkit.io import load_fixture

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ex0():
    return load_fixture("alpha0")


@pytest.fixture(scope="session")
def ex4():
    return load_fixture("alpha4")


@pytest.fixture(scope="session")
def gus():
    return load_fixture("gus_pattern")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
