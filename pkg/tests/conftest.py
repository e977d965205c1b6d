import numpy as np
import pytest

from pathgbm import Graph


@pytest.fixture
def star_graph():
    # node 0 labelled 0, leaves 1 and 2 labelled 1
    return Graph.build(
        3,
        [0, 1, 1],
        [(0, 1), (0, 2)],
        node_attrs=np.array([[1.0], [2.0], [3.0]]),
        edge_attrs=np.array([[10.0], [20.0]]),
    )


@pytest.fixture
def triangle_graph():
    # 0 labelled 0; 1 and 2 labelled 1; fully connected
    return Graph.build(
        3,
        [0, 1, 1],
        [(0, 1), (0, 2), (1, 2)],
        node_attrs=np.array([[1.0], [2.0], [3.0]]),
        edge_attrs=np.array([[10.0], [20.0], [30.0]]),
    )


@pytest.fixture
def chain_graph():
    # labels 0 - 1 - 2 in a path
    return Graph.build(
        3,
        [0, 1, 2],
        [(0, 1), (1, 2)],
        node_attrs=np.array([[1.0, -1.0], [2.0, -2.0], [3.0, -3.0]]),
        edge_attrs=np.array([[5.0], [6.0]]),
    )
