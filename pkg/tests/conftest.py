import numpy as np
import pytest

from tango.graphs.graph import Graph
from tango.models.energy import init_energy_model, init_tangent_model
from tango.schemas.config import TangoConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def path5():
    return Graph.from_edges(5, [(i, i + 1) for i in range(4)])


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def small_graph():
    # 5-cycle with a chord
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])


@pytest.fixture
def tanh_cfg():
    return TangoConfig(d=3, L_gnn=1, L=3, activation="tanh", epsilon=0.1)


@pytest.fixture
def models(rng, tanh_cfg):
    return init_energy_model(rng, tanh_cfg), init_tangent_model(rng, tanh_cfg)
