import pytest

from mrqm import design, make_case


@pytest.fixture(scope="session")
def case_a():
    return make_case("A")


@pytest.fixture(scope="session")
def case_b():
    return make_case("B")


@pytest.fixture(scope="session")
def design_a():
    return design([1.0, 1.0, 1.0], 1.0, 4)


@pytest.fixture(scope="session")
def design_b():
    return design([0.8, 1.0, 0.8], 1.0, 3)
