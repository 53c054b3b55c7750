import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from anisolab import ScalarField, make_grid

settings.register_profile(
    "numeric", deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("numeric")


@pytest.fixture
def unit_square():
    def build(n: int, q: int = 1):
        return make_grid([(0.0, 1.0), (0.0, 1.0)], (n, n), q)
    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(grid, rng, boundary_zero=False) -> ScalarField:
    vals = rng.standard_normal(grid.node_shape)
    if boundary_zero:
        out = np.zeros_like(vals)
        inner = tuple(slice(1, n) for n in grid.cells)
        out[inner] = vals[inner]
        vals = out
    return ScalarField(grid, vals)
