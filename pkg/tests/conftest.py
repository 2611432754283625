import numpy as np
import pytest

from cwillmore import homogeneous_torus


@pytest.fixture(scope="session")
def clifford():
    return homogeneous_torus(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
