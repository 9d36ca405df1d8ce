import numpy as np
import pytest

from meshcap.grid import square_grid
from meshcap.phy_mac import PhyParams, make_schedule


@pytest.fixture
def grid3():
    return square_grid(3)


@pytest.fixture
def grid6():
    return square_grid(6)


@pytest.fixture
def sched6(grid6):
    return make_schedule(grid6)


@pytest.fixture
def phy():
    return PhyParams(power=1.0, noise=1e-6, gamma=4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
