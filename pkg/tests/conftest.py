import pytest

from probegain import RelaxationSet, spontaneous_halfwidths


@pytest.fixture
def neon1():
    return spontaneous_halfwidths(3e7, 5e7, 1e7, 0.5e7)


@pytest.fixture
def neon2():
    return spontaneous_halfwidths(1e7, 5e7, 3e7, 0.5e7)


@pytest.fixture
def r_iv():
    return RelaxationSet(gamma_m=3e7, gamma_n=1e7, gamma_mn=0.0, Gamma=10e7, Gamma_gn=10e7, Gamma_gm=10e7)
