import numpy as np
import pytest

from futureq import build_q, eig_decompose, standard_2x2, random_diagonalizable


@pytest.fixture(scope="session")
def std_pair():
    """Decomposition + metric for the running 2x2 example."""
    dec = eig_decompose(standard_2x2())
    return dec, build_q(dec)


@pytest.fixture(scope="session")
def rnd_pair():
    """Factory: decomposition + metric for a seeded random Hamiltonian."""

    def make(dim: int, seed: int):
        dec = eig_decompose(random_diagonalizable(dim, seed))
        return dec, build_q(dec)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
