import pytest

from quartop.catalog import all_entries, example, follyton
from quartop.numgrid import Grid


@pytest.fixture(scope="session")
def entries():
    return {e.name: e for e in all_entries()}


@pytest.fixture(scope="session")
def ex1():
    return example(1)


@pytest.fixture(scope="session")
def ex2():
    return example(2)


@pytest.fixture(scope="session")
def fol1():
    return follyton(1.0)


@pytest.fixture
def small_grid():
    return Grid(-20.0, 20.0, 801)
