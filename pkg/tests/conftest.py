import numpy as np
import pytest

import polarkit as pk

REF_WEIGHTS = (1.0, np.sqrt(2.0), np.sqrt(3.0))


@pytest.fixture(scope="session")
def shift4():
    """The dim-4 shift with weights (1, sqrt2, sqrt3): aa* - a*a = 1 inside."""
    return pk.build(pk.weighted_shift(REF_WEIGHTS))


@pytest.fixture(scope="session")
def unit_shift4():
    return pk.build(pk.weighted_shift((1.0, 1.0, 1.0)))


@pytest.fixture(scope="session")
def q_half_8():
    return pk.build(pk.q_oscillator(8, 0.5, 1.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260819)


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
