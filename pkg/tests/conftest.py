import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from levy_orlicz import GridFunction, Kernel

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def frac():
    """Fractional kernel d=1, p=2, s=1/4."""
    return Kernel.fractional(0.25)


@pytest.fixture(scope="session")
def hat():
    return GridFunction.from_callable(lambda x: np.maximum(0.0, 1.0 - np.abs(x)), -2, 2, 1025,
                                      label="hat")


@pytest.fixture(scope="session")
def indicator():
    vals = np.concatenate([np.zeros(256), np.ones(256), np.zeros(256)])
    return GridFunction(vals, 1 / 256, (-1.0,), "constant", "indicator")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
