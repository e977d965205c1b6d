"""Synthetic data shared by the demo scripts.

Graphs are short labelled chains.  Positive graphs contain the label run
0-1-2 somewhere; negatives are resampled until no such path occurs,
verified with the package's own counter so the class rule is exact by
construction.  The graphs carry no node or edge attributes, which keeps
automatic anchor selection on the label column at any training-set size.
"""

import numpy as np

from pathgbm import Dataset, Graph, count_occurrences

PATTERN = (0, 1, 2)
N_LABELS = 3


def _chain(labels):
    n = len(labels)
    return Graph.build(
        node_count=n,
        node_labels=labels,
        edges=[(i, i + 1) for i in range(n - 1)],
    )


def _has_pattern(graph):
    return count_occurrences(graph, tuple(range(graph.node_count)), PATTERN) > 0


def chain_pattern_dataset(n_graphs=60, seed=3):
    """Balanced two-class dataset: class 1 iff the 0-1-2 path occurs."""
    rng = np.random.default_rng(seed)
    graphs, targets = [], []
    for i in range(n_graphs):
        n = int(rng.integers(5, 9))
        positive = i % 2 == 1
        while True:
            labels = rng.integers(0, N_LABELS, size=n)
            if positive:
                at = int(rng.integers(0, n - 2))
                labels[at : at + 3] = PATTERN
            g = _chain(labels)
            if _has_pattern(g) == positive:
                break
        graphs.append(g)
        targets.append(float(positive))
    return Dataset(
        name="chain_pattern",
        graphs=tuple(graphs),
        targets=np.array(targets),
        label_alphabet=tuple(str(i) for i in range(N_LABELS)),
        node_attr_dim=0,
        edge_attr_dim=0,
    )
