import numpy as np
import pytest

from vchoquet.geometry import Space


@pytest.fixture
def square_primal():
    """Primal ball conv{(+-1, +-1)}: dual norm is l1, dual ball the diamond."""
    return Space.cube(2)


@pytest.fixture
def square_dual():
    """Primal ball conv{+-e1, +-e2}: dual norm is l-infinity, dual ball the square."""
    return Space.cross_polytope(2)


@pytest.fixture
def cube_dual():
    return Space.cross_polytope(3)


@pytest.fixture
def octahedron_dual():
    return Space.cube(3)


@pytest.fixture
def euclid2():
    return Space.euclidean(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
