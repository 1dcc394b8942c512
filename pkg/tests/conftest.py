import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("locint", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("locint")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
