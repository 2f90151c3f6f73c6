import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def rand_density(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
