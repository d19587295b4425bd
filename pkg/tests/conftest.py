"""Shared fixtures and hypothesis settings for the wittsym test suite."""

from hypothesis import HealthCheck, settings
import pytest

from wittsym import make_field, make_ratfunc_field

settings.register_profile(
    "wittsym",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("wittsym")


@pytest.fixture(scope="session")
def f2():
    return make_field(2)


@pytest.fixture(scope="session")
def f3():
    return make_field(3)


@pytest.fixture(scope="session")
def f4():
    return make_field(2, 2)


@pytest.fixture(scope="session")
def f8():
    return make_field(2, 3)


@pytest.fixture(scope="session")
def f9():
    return make_field(3, 2)


@pytest.fixture(scope="session")
def r2t(f2):
    return make_ratfunc_field(f2)


@pytest.fixture(scope="session")
def r3t(f3):
    return make_ratfunc_field(f3)


@pytest.fixture(scope="session")
def r4t(f4):
    return make_ratfunc_field(f4)
