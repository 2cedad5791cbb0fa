import pytest
from hypothesis import settings

from hodgeq.goettsche import HodgeDiamond, surface

settings.register_profile("ci", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def cp2():
    return surface("cp2")


@pytest.fixture(scope="session")
def k3():
    return surface("k3")


@pytest.fixture(scope="session")
def abelian():
    return surface("abelian")


@pytest.fixture(scope="session")
def enriques():
    return surface("enriques")


@pytest.fixture(scope="session")
def all_surfaces(cp2, k3, abelian, enriques):
    return [cp2, k3, abelian, enriques]


@pytest.fixture(scope="session")
def chi_one_surface():
    # chi = 1, sigma = -1: the trivial specialization is the partition series
    return HodgeDiamond(1, 0, 3)
