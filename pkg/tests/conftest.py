from __future__ import annotations

import pytest

from sari_sim.catalog import load_catalog
from sari_sim.config import SimConfig
from sari_sim.store import data_file, load_packaged_layout, reset_world


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(data_file("catalog.json"))


@pytest.fixture(scope="session")
def config():
    return SimConfig()


@pytest.fixture(scope="session")
def layouts():
    return {i: load_packaged_layout(i) for i in (1, 2, 3)}


@pytest.fixture()
def world(catalog, config):
    return reset_world(1, 42, catalog, config)
