import numpy as np
import pytest

from kfgbox.core import Grid, natural_units


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit():
    return natural_units()


@pytest.fixture
def grid101():
    return Grid(0.0, 1.0, 101)
