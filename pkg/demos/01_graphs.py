"""Build labelled graphs by hand and inspect the dataset container.

Run:  python3 demos/01_graphs.py
"""

import numpy as np

from pathgbm import Dataset, Graph, edge_attributes, neighbors, validate_graph

# a 4-node "molecule": a triangle with a tail hanging off node 2
#
#   0 --- 1
#    \   /
#      2 --- 3
#
g = Graph.build(
    node_count=4,
    node_labels=[0, 1, 1, 2],
    edges=[(0, 1), (0, 2), (1, 2), (2, 3)],
    node_attrs=[[1.0], [2.0], [3.0], [4.0]],
    edge_attrs=[[10.0], [20.0], [30.0], [40.0]],
)

print("nodes:", g.node_count, "edges:", g.edge_count)
print("labels:", g.node_labels.tolist())
print("neighbours of node 2:", neighbors(g, 2))
print("attributes of edge (2, 1):", edge_attributes(g, 2, 1).tolist())

# edge lists are canonicalised: direction and duplicates do not matter
same = Graph.build(
    node_count=4,
    node_labels=[0, 1, 1, 2],
    edges=[(1, 0), (2, 0), (2, 1), (3, 2), (0, 1)],
    node_attrs=[[1.0], [2.0], [3.0], [4.0]],
    edge_attrs=[[10.0], [20.0], [30.0], [40.0], [10.0]],
)
print("reordered edge list builds an identical graph:", g.equals(same))

# the validator reports structural problems instead of raising
print("violations in a clean graph:", validate_graph(g))

ds = Dataset(
    name="demo",
    graphs=(g, same),
    targets=np.array([0.0, 1.0]),
    label_alphabet=("C", "N", "O"),
    node_attr_dim=1,
    edge_attr_dim=1,
)
print("dataset:", ds.name, "with", ds.graph_count, "graphs; issues:", ds.validate())
