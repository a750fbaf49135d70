import numpy as np
import pytest

from noma_osd.codes import build_ebch


@pytest.fixture(scope="session")
def c84():
    return build_ebch(8, 4)


@pytest.fixture(scope="session")
def c6416():
    return build_ebch(64, 16)


@pytest.fixture(scope="session")
def c6430():
    return build_ebch(64, 30)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
