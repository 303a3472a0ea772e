import pytest

from qecauth import codes
from qecauth.auth_schemes import clifford_family, strong_trap_family, trap_family


@pytest.fixture(scope="session")
def css1():
    return codes.rm_css(1)


@pytest.fixture(scope="session")
def css2():
    return codes.rm_css(2)


@pytest.fixture(scope="session")
def trap1(css1):
    return trap_family(css1)


@pytest.fixture(scope="session")
def strap1(css1):
    return strong_trap_family(css1)


@pytest.fixture(scope="session")
def cliff16():
    return clifford_family(1, 6)
