import numpy as np
import pytest

from mtcavity import qstate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    rank = rank or dim
    weights = rng.random(rank)
    weights /= weights.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        psi = random_state(rng, dim)
        rho += w * qstate.pure_state_density(psi)
    return rho
