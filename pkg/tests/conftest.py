import numpy as np
import pytest

from volterra_chain.lattice import a_from_u


def random_chains(count, sizes, seed, low=0.5, high=2.0):
    """Deterministic corpus of ``(u, a)`` pairs with ``u`` uniform in ``[low, high]``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        N = int(sizes[i % len(sizes)])
        u = rng.uniform(low, high, N)
        out.append((u, a_from_u(u)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
