import numpy as np
import pytest

from wassrisk import Empirical


def random_empirical(rng, max_atoms=40, spread=2.5, uniform_weights=False):
    n = int(rng.integers(2, max_atoms + 1))
    vals = rng.normal(0.0, spread, n)
    if uniform_weights:
        w = np.full(n, 1.0 / n)
    else:
        w = rng.dirichlet(np.ones(n))
        w = np.maximum(w, 1e-9)
        w = w / w.sum()
    return Empirical(tuple(zip(vals.tolist(), w.tolist())))


def coupled_arrays(rng, max_atoms=25):
    """Raw (x, y, w) for two laws sharing a finite sample space; keep the raw
    arrays for couplings since Empirical re-sorts its atoms."""
    n = int(rng.integers(2, max_atoms + 1))
    w = rng.dirichlet(np.ones(n))
    w = np.maximum(w, 1e-9)
    w = w / w.sum()
    return rng.normal(0.0, 2.0, n), rng.normal(0.5, 1.5, n), w


def emp(values, weights) -> Empirical:
    return Empirical(tuple(zip(np.asarray(values, dtype=float).tolist(),
                               np.asarray(weights, dtype=float).tolist())))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
