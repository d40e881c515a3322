import numpy as np
import pytest

from simplexflow.measure import DiscreteMeasure


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_measure(rng, n, max_atoms=8, min_atoms=2, scale=1.0):
    """Random measure with positive normalized weights."""
    k = int(rng.integers(min_atoms, max_atoms + 1))
    pts = scale * rng.standard_normal((k, n))
    w = rng.random(k) + 0.05
    return DiscreteMeasure(pts, w / w.sum())


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
