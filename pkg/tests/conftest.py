import math

import numpy as np
import pytest

from src.models.params import DispersionParams, TailPolicy, TimeWindow
from src.services.grid import make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def unit_grid():
    """dx = 0.25 on [-256, 256); resolves unit-scale inputs."""
    return make_grid(0.0, 512.0, 2048)


@pytest.fixture
def spectral_grid():
    """dxi = 1/16, Nyquist 32."""
    return make_grid(0.0, 2.0 * math.pi * 16, 1024)


@pytest.fixture
def free():
    return DispersionParams(mu=0.0)


@pytest.fixture
def short_window():
    return TimeWindow(t_max=4.0, steps=400, tail_policy=TailPolicy.NONE)
