"""Path occurrences, prefix statistics and the extended feature vector.

Run:  python3 demos/02_paths_and_features.py
"""

from pathgbm import (
    Graph,
    enumerate_occurrences,
    extended_feature_row,
    extension_counts,
    feature_row_length,
    feature_row_names,
    prefix_stats,
)

g = Graph.build(
    node_count=4,
    node_labels=[0, 1, 1, 2],
    edges=[(0, 1), (0, 2), (1, 2), (2, 3)],
    node_attrs=[[1.0], [2.0], [3.0], [4.0]],
    edge_attrs=[[10.0], [20.0], [30.0], [40.0]],
)
anchors = tuple(range(g.node_count))  # automatic mode: every node anchors

# a labelled path is a tuple of label ids; an occurrence is a concrete
# simple-path realisation starting at an anchor
path = (0, 1, 2)
occ = enumerate_occurrences(g, anchors, path)
print(f"occurrences of labels {path}: {list(occ)}")

# per-prefix counts and attribute sums come from a single traversal
stats = prefix_stats(g, anchors, path)
print("prefix counts:", stats.counts.tolist())
print("prefix terminal-attr sums:", stats.node_attr_sums.tolist())

# the extended feature vector lines those up per prefix: count, averaged
# terminal-node attributes, averaged last-edge attributes (from length 2 on)
row = extended_feature_row(g, anchors, path)
names = feature_row_names(["0", "1", "2"], node_attr_dim=1, edge_attr_dim=1)
print("feature layout:")
for name, value in zip(names, row):
    print(f"  {name:24s} {value:g}")
assert row.shape[0] == feature_row_length(len(path), 1, 1)

# counts-only variant used by the restricted ablation mode
print("restricted row:", extended_feature_row(g, anchors, path, restricted=True).tolist())

# lazy candidate growth: a selected path proposes its one-node extensions,
# with per-extension occurrence counts
print("one-node extensions of (0, 1):", extension_counts(g, anchors, (0, 1)))
