# tests/conftest.py
import numpy as np
import pytest

from core.config import settings
from data.dataset import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def separable_1d():
    x = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]])
    y = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
    return Dataset(x, y)


@pytest.fixture
def xor4():
    x = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([1.0, -1.0, -1.0, 1.0])
    return Dataset(x, y)


@pytest.fixture
def contradictory():
    """Two copies of one point with opposite labels."""
    return Dataset(np.array([[1.0], [1.0]]), np.array([1.0, -1.0]))


@pytest.fixture(autouse=True)
def no_redis(monkeypatch):
    monkeypatch.setattr(settings, "redis_url", None)
