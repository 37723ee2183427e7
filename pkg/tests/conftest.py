import pytest

from hystlwr import default_family


@pytest.fixture(scope="session")
def fam():
    return default_family()
