"""Shared pytest fixtures."""

import pytest

from shared.config import reload_config
from services.action.corpus import similar_rotation as make_similar_rotation


@pytest.fixture(autouse=True)
def fresh_config():
    """Reload configuration so overrides never leak between tests."""
    config = reload_config()
    yield config
    reload_config()


@pytest.fixture
def similar_rotation():
    """T = D R(pi/3) D^-1 with D = diag(2, 1)."""
    return make_similar_rotation()
