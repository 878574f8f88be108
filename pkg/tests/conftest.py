import random

import pytest

from sdkex.groupring import GroupRing, symmetric_group, alternating_group, default_ring
from sdkex.nilpotent import NilpotentParams

ACCEPTANCE_RESULTS = []


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def a5_ring():
    return default_ring()


@pytest.fixture(scope="session")
def s3_ring():
    return GroupRing(symmetric_group(3), 5)


@pytest.fixture(scope="session")
def a4_ring():
    return GroupRing(alternating_group(4), 7)


@pytest.fixture(params=[3, 5, 7], ids=lambda p: f"p{p}")
def nil_params(request):
    return NilpotentParams(request.param, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
