import pytest

from multibump.grid import Grid
from multibump.groundstate import Nonlinearity, compute_ground_state


@pytest.fixture(scope="session")
def gs_cubic():
    return compute_ground_state(Nonlinearity(3.0), 1)


@pytest.fixture(scope="session")
def gs_quadratic():
    return compute_ground_state(Nonlinearity(2.0), 1)


@pytest.fixture(scope="session")
def gs_cubic_2d():
    return compute_ground_state(Nonlinearity(3.0), 2)


@pytest.fixture(scope="session")
def grid_medium():
    return Grid(dim=1, half_width=40.0, spacing=0.05)


@pytest.fixture(scope="session")
def grid_wide():
    return Grid(dim=1, half_width=68.0, spacing=0.05)
