import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)
