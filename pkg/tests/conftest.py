import pytest

from relwave.grid import make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid(4096, 80.0)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(1024, 80.0)
