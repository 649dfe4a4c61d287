import numpy as np
import pytest

from channelwave.radial_state import make_grid


@pytest.fixture(scope="session")
def grid20():
    """r_max = 20 at dr = 1/256."""
    return make_grid(20.0, 20 * 256)


@pytest.fixture(scope="session")
def grid_w():
    """Grid resolving W well on [0, 40]."""
    return make_grid(40.0, 40 * 256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
