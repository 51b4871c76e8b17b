"""
Shared fixtures for the solver tests.
"""
import numpy as np
import pytest

from src.lp import LpInstance, LpParameters, PathState, central_path_oracle


@pytest.fixture
def tiny_lp():
    """min x1 + 2 x2 s.t. x1 + x2 = 1, optimum (1, 0)."""
    return LpInstance(np.array([[1.0, 1.0]]), np.array([1.0]), np.array([1.0, 2.0]))


@pytest.fixture
def tiny_params(tiny_lp):
    """r = 1/2, R = 1, L = sqrt 5."""
    return LpParameters.for_instance(tiny_lp, 0.5, 1.0)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(0)


@pytest.fixture
def path_state():
    """Factory for exactly centered states from the central path oracle."""

    def make(lp, t, mu=None):
        target = np.full(lp.n, t) if mu is None else np.asarray(mu, dtype=np.float64)
        point = central_path_oracle(lp, target)
        return PathState.create(point, t)

    return make
