import pytest

from auvmpc.params import VehicleParams


@pytest.fixture(scope="session")
def params() -> VehicleParams:
    return VehicleParams()
