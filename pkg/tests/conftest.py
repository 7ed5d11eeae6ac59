import pytest

from qfree.csp import inequality_instance


@pytest.fixture
def triangle():
    return inequality_instance(3, [(0, 1), (0, 2), (1, 2)], 2)


@pytest.fixture
def square():
    return inequality_instance(4, [(0, 1), (1, 2), (2, 3), (0, 3)], 2)
