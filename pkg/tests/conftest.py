import numpy as np
import pytest

from lproth.mollifier import build_mollifier


@pytest.fixture(scope="session")
def moll():
    return build_mollifier()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
