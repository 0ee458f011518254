import numpy as np
import pytest

from sbpmhd.physics import EquationParams, prim_to_cons


@pytest.fixture
def params():
    return EquationParams()


def random_primitives(rng, shape):
    """Admissible random primitive states, broadcastable to (*, 9)."""
    prim = np.empty(shape + (9,))
    prim[..., 0] = rng.uniform(0.5, 2.0, shape)
    prim[..., 1:4] = rng.uniform(-1.0, 1.0, shape + (3,))
    prim[..., 4] = rng.uniform(0.5, 2.0, shape)
    prim[..., 5:8] = rng.uniform(-1.0, 1.0, shape + (3,))
    prim[..., 8] = rng.uniform(-0.5, 0.5, shape)
    return prim


def random_states(rng, shape, params=None):
    if params is None:
        params = EquationParams()
    return prim_to_cons(random_primitives(rng, shape), params)
