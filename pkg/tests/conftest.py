import pytest

from foliage.library import abelian, filiform4, kodaira_thurston


@pytest.fixture(scope="session")
def kt34():
    return kodaira_thurston((3, 4), split=([1], [2]))


@pytest.fixture(scope="session")
def kt14():
    return kodaira_thurston((1, 4), split=([2], [3]))


@pytest.fixture(scope="session")
def ab():
    return abelian().with_split([3], [4])


@pytest.fixture(scope="session")
def fil():
    return filiform4()
