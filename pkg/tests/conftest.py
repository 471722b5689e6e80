import numpy as np
import pytest

from aop.suite import random_suite


@pytest.fixture(scope="session")
def suite():
    return random_suite()


@pytest.fixture(scope="session")
def regular_suite(suite):
    return [(lab, A) for lab, A in suite if lab.startswith("regular")]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, rows, cols, field="R"):
    A = rng.standard_normal((rows, cols))
    if field == "C":
        A = A + 1j * rng.standard_normal((rows, cols))
    return A
