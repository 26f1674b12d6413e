import pytest

from hardcore1d.units import BoxGeometry, PhysicalUnits


@pytest.fixture
def box():
    return BoxGeometry(2.0)


@pytest.fixture
def units():
    return PhysicalUnits()
