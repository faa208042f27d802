import math

import pytest

from hyperslice import SphereParams, TorusParams, make_3sphere, make_3torus


@pytest.fixture(scope="session")
def torus_tiny():
    return make_3torus(TorusParams(delta_ang=math.pi / 2))


@pytest.fixture(scope="session")
def torus_small():
    return make_3torus(TorusParams(delta_ang=math.pi / 4))


@pytest.fixture(scope="session")
def sphere_small():
    return make_3sphere(SphereParams(radius=1.0, steps=(4, 4, 6)))


@pytest.fixture(scope="session")
def sphere_medium():
    return make_3sphere(SphereParams(radius=1.0, steps=(8, 8, 16)))
