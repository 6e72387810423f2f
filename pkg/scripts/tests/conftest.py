import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


@pytest.fixture
def crandn(rng):
    """Complex standard normal samples of a given shape."""

    def draw(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    return draw
