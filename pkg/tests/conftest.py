import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import airport_cubble, meteo_table, station_table  # noqa: E402


@pytest.fixture
def stations():
    return station_table()


@pytest.fixture
def meteo():
    return meteo_table()


@pytest.fixture
def cb_spatial():
    return airport_cubble()


@pytest.fixture
def cb_temporal(cb_spatial):
    return cb_spatial.face_temporal()
