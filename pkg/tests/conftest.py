import pytest

from semiseries import harmonic, quartic


@pytest.fixture
def quartic1():
    return quartic(1.0)


@pytest.fixture
def harmonic1():
    return harmonic(1.0)
