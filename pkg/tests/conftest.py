import os

import pytest
from hypothesis import HealthCheck, settings

from copduality.model import load_problem

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def ex1():
    return load_problem("ex1")


@pytest.fixture(scope="session")
def ex2():
    return load_problem("ex2")


@pytest.fixture(scope="session")
def ex3():
    return load_problem("ex3")
