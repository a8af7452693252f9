from __future__ import annotations

import pytest

from chiang_ogw.analysis import boundary_table, interior_table
from chiang_ogw.closed_gw import ClosedGW
from chiang_ogw.open_gw import OpenGW


@pytest.fixture(scope="session")
def closed() -> ClosedGW:
    return ClosedGW()


@pytest.fixture(scope="session")
def engine(closed) -> OpenGW:
    return OpenGW(closed)


@pytest.fixture(scope="session")
def boundary32(engine):
    return boundary_table(engine, 32)


@pytest.fixture(scope="session")
def interior8(engine):
    return interior_table(engine, 8)
