import numpy as np
import pytest

from gausslink import DeviceCaps
from gausslink.sampling import generator


@pytest.fixture
def rng():
    return generator(20260808, stream=0)


@pytest.fixture
def simple_caps():
    return DeviceCaps(d_a=100.0, d_b=10.0, tau_a=0.9, tau_b=0.8, n_th=0.0)


def random_covmat_channel(rng: np.random.Generator, dim: int = 4):
    """Random (T, N) pair with symmetric positive semidefinite N."""
    T = rng.normal(size=(dim, dim))
    G = rng.normal(size=(dim, dim))
    return T, G @ G.T
