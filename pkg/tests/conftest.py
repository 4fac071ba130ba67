import random

import pytest

from pluckerlab.scalars import QQ, PrimeField


@pytest.fixture
def fp():
    return PrimeField()


@pytest.fixture
def qq():
    return QQ


@pytest.fixture
def rng():
    return random.Random(20240817)
