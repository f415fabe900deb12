import pytest

from isoratio.family import load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry()
