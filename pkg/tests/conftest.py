import pytest

from freelines import fixtures


@pytest.fixture(scope="session")
def boolean():
    return fixtures.boolean_arrangement()


@pytest.fixture(scope="session")
def near_pencil5():
    return fixtures.near_pencil(5)


@pytest.fixture(scope="session")
def free13():
    return fixtures.free_13()


@pytest.fixture(scope="session")
def free19():
    return fixtures.free_19()


@pytest.fixture(scope="session")
def free20():
    return fixtures.free_20()


@pytest.fixture(scope="session")
def generic4():
    return fixtures.generic_four()
