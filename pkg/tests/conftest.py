import pytest

from hapqkd.scenario import Scenario


@pytest.fixture
def defaults() -> Scenario:
    return Scenario()
