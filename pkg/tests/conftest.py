import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sym(rng, shape):
    A = rng.normal(size=shape)
    return A + np.swapaxes(A, 0, 1)


def sym3(rng, m):
    import itertools
    C = rng.normal(size=(4, 4, 4, m))
    return sum(np.transpose(C, p + (3,)) for p in itertools.permutations(range(3))) / 6
