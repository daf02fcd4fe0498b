import numpy as np
import pytest
from hypothesis import settings

from cmdnls.grid import Field, make_grid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_field(grid, seed, decay=None):
    """Random complex field; with ``decay`` the spectrum is damped like exp(-decay |xi|)."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
    if decay is not None:
        c *= np.exp(-decay * np.abs(grid.xi))
    return Field.from_coeffs(grid, c)


@pytest.fixture
def torus_pi():
    """L = pi so that xi_k = k."""
    return make_grid(np.pi, 64)
