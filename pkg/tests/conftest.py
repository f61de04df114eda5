import pytest

from firstreturn.gallery import default_table, prop25_dense
from firstreturn.space import CANTOR, UNIT, good_basis
from firstreturn.cli import dyadic_dense


@pytest.fixture(scope="session")
def psi_table():
    return default_table()


@pytest.fixture(scope="session")
def dense25():
    return prop25_dense()


@pytest.fixture(scope="session")
def cantor_basis():
    return good_basis(CANTOR)


@pytest.fixture(scope="session")
def unit_basis():
    return good_basis(UNIT)


@pytest.fixture(scope="session")
def dyadics():
    return dyadic_dense(depth=10)
