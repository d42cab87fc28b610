import numpy as np
import pytest


def random_instance(rng, n=None, m=None, lo=0.2):
    """Strictly positive unit-mass marginals and a cost matrix in [0, 1]."""
    if n is None:
        n = int(rng.integers(2, 5))
    if m is None:
        m = int(rng.integers(2, 5))
    mu = rng.uniform(lo, 1.0, n)
    mu /= mu.sum()
    nu = rng.uniform(lo, 1.0, m)
    nu /= nu.sum()
    c = rng.uniform(0.0, 1.0, (n, m))
    return mu, nu, c


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
