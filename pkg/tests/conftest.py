import pytest

from isoperim.gaussian import BellmanParams


@pytest.fixture(scope="session")
def params() -> BellmanParams:
    return BellmanParams.create()
