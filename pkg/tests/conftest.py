import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tsaudit.core import TimeSeriesMatrix

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def ar1(T, phi, rng, burn=200):
    e = rng.standard_normal(T + burn)
    x = np.empty_like(e)
    x[0] = e[0]
    for t in range(1, e.size):
        x[t] = phi * x[t - 1] + e[t]
    return x[burn:]


def panel(x, mask=None, timestamps=None):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return TimeSeriesMatrix.from_array(x, timestamps=timestamps, mask=mask)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def full_atlas():
    """The default 500-entry atlas (master seed 0), built once per session."""
    from tsaudit.atlas import generate_atlas

    return generate_atlas(0, 50)


@pytest.fixture(scope="session")
def full_benchmark(full_atlas):
    from tsaudit.eval import run_benchmark

    return run_benchmark(full_atlas[0], split_seed=0)
