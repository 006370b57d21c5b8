import numpy as np
import pytest

import causalkit as ck


@pytest.fixture(scope="session")
def grid64():
    return ck.SpatialGrid(2, 64, 8.0)


@pytest.fixture(scope="session")
def grid96_12():
    return ck.SpatialGrid(2, 96, 12.0)


@pytest.fixture(scope="session")
def grid128():
    return ck.SpatialGrid(2, 128, 8.0)


@pytest.fixture(scope="session")
def grid256():
    return ck.SpatialGrid(2, 256, 8.0)


@pytest.fixture(scope="session")
def mink64(grid64):
    return ck.minkowski(grid64)


@pytest.fixture(scope="session")
def mink128(grid128):
    return ck.minkowski(grid128)


def const_spacetime(grid, beta_value, h_matrix):
    """Spacetime with constant coefficients (test helper)."""
    h_matrix = np.asarray(h_matrix, dtype=float)

    def beta(t, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], float(beta_value))

    def h(t, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(h_matrix, x.shape[:-1] + h_matrix.shape).copy()

    return ck.StandardSpacetime(grid, beta, h, name="const", time_dependent=False)
