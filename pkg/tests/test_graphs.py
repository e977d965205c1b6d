import numpy as np
import pytest

from pathgbm import Dataset, Graph, edge_attributes, neighbors, validate_graph
from pathgbm.graphs import _readonly


def test_build_canonicalises_edges():
    g = Graph.build(3, [0, 1, 2], [(2, 0), (1, 0)])
    assert g.edges == ((0, 1), (0, 2))
    assert g.adjacency == ((1, 2), (0,), (0,))


def test_build_collapses_identical_duplicate_edges():
    attrs = np.array([[1.0], [1.0]])
    g = Graph.build(2, [0, 0], [(0, 1), (1, 0)], edge_attrs=attrs)
    assert g.edges == ((0, 1),)
    assert g.edge_attrs.shape == (1, 1)


def test_build_rejects_conflicting_duplicate_edges():
    attrs = np.array([[1.0], [2.0]])
    with pytest.raises(ValueError, match="conflicting"):
        Graph.build(2, [0, 0], [(0, 1), (1, 0)], edge_attrs=attrs)


def test_build_rejects_self_loop():
    with pytest.raises(ValueError, match="self loop"):
        Graph.build(2, [0, 0], [(1, 1)])


def test_build_rejects_out_of_range_edge():
    with pytest.raises(ValueError, match="out of range"):
        Graph.build(2, [0, 0], [(0, 5)])


def test_arrays_are_read_only(star_graph):
    with pytest.raises(ValueError):
        star_graph.node_labels[0] = 3
    with pytest.raises(ValueError):
        star_graph.node_attrs[0, 0] = 9.9


def test_neighbors(star_graph):
    assert neighbors(star_graph, 0) == (1, 2)
    assert neighbors(star_graph, 1) == (0,)
    with pytest.raises(ValueError, match="out of range"):
        neighbors(star_graph, 3)


def test_edge_attributes_symmetric_lookup(star_graph):
    assert edge_attributes(star_graph, 0, 2)[0] == 20.0
    assert edge_attributes(star_graph, 2, 0)[0] == 20.0
    with pytest.raises(ValueError, match="no edge"):
        edge_attributes(star_graph, 1, 2)


def test_validate_clean_graph(star_graph):
    assert validate_graph(star_graph) == []
    assert validate_graph(star_graph, node_attr_dim=1, edge_attr_dim=1) == []


def test_validate_detects_asymmetric_adjacency():
    g = Graph(
        adjacency=((1,), ()),
        node_labels=np.array([0, 0]),
        node_attrs=np.zeros((2, 0)),
        edges=((0, 1),),
        edge_attrs=np.zeros((1, 0)),
    )
    msgs = validate_graph(g)
    assert any("asymmetric" in m for m in msgs)


def test_validate_detects_missing_edge_attribute_row():
    g = Graph(
        adjacency=((1,), (0,)),
        node_labels=np.array([0, 0]),
        node_attrs=np.zeros((2, 0)),
        edges=(),
        edge_attrs=np.zeros((0, 0)),
    )
    msgs = validate_graph(g)
    assert any("no attribute row" in m for m in msgs)


def test_validate_detects_attribute_dim_mismatch(star_graph):
    msgs = validate_graph(star_graph, node_attr_dim=2, edge_attr_dim=1)
    assert any("attribute length" in m for m in msgs)


def test_validate_detects_self_loop_and_duplicates():
    g = Graph(
        adjacency=((0, 1, 1), (0, 0)),
        node_labels=np.array([0, 0]),
        node_attrs=np.zeros((2, 0)),
        edges=((0, 1),),
        edge_attrs=np.zeros((1, 0)),
    )
    msgs = " ".join(validate_graph(g))
    assert "self loop" in msgs
    assert "duplicate neighbour" in msgs


def _toy_dataset():
    g1 = Graph.build(2, [0, 1], [(0, 1)])
    g2 = Graph.build(1, [1], [])
    return Dataset(
        name="toy",
        graphs=(g1, g2),
        targets=_readonly(np.array([1.0, 0.0])),
        label_alphabet=("a", "b"),
        node_attr_dim=0,
        edge_attr_dim=0,
    )


def test_dataset_validate_and_subset():
    ds = _toy_dataset()
    assert ds.validate() == []
    sub = ds.subset([1])
    assert sub.graph_count == 1
    assert sub.targets.tolist() == [0.0]
    assert sub.label_alphabet == ds.label_alphabet
    assert sub.graphs[0].equals(ds.graphs[1])


def test_dataset_detects_label_outside_alphabet():
    g = Graph.build(1, [5], [])
    ds = Dataset(
        name="bad",
        graphs=(g,),
        targets=np.array([0.0]),
        label_alphabet=("a", "b"),
        node_attr_dim=0,
        edge_attr_dim=0,
    )
    assert any("alphabet" in m for m in ds.validate())


def test_dataset_equals():
    assert _toy_dataset().equals(_toy_dataset())
    other = _toy_dataset().subset([0, 1], name="renamed")
    assert not _toy_dataset().equals(other)
