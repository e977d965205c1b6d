"""Independent reference implementations used to cross-check the package.

Everything here is deliberately brute force and shares no code with the
library: path occurrences come from exhaustive simple-path enumeration over
the raw adjacency structure, split search scans every (feature, threshold)
pair, and gradients come from central finite differences.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def brute_occurrences(graph, anchors, path):
    """Every anchored occurrence of ``path`` by exhaustive search.

    Enumerates all simple node sequences of the right length from every
    anchor, then keeps those whose labels spell the path.  No label-based
    pruning during the walk, so the search shares nothing with a pruned DFS.
    """
    m = len(path)
    labels = [int(x) for x in graph.node_labels]
    found = []

    def extend(seq):
        if len(seq) == m:
            if all(labels[v] == path[i] for i, v in enumerate(seq)):
                found.append(tuple(seq))
            return
        for w in range(graph.node_count):
            if w in seq:
                continue
            if w in graph.adjacency[seq[-1]]:
                extend(seq + [w])

    for a in sorted(set(anchors)):
        extend([a])
    return sorted(found)


def brute_prefix_feature_row(graph, anchors, path, node_attr_dim, edge_attr_dim):
    """Extended feature vector built naively from brute-force occurrences."""
    parts = []
    m = len(path)
    for s in range(1, m + 1):
        occs = brute_occurrences(graph, anchors, path[:s])
        count = len(occs)
        parts.append(float(count))
        if node_attr_dim:
            if count:
                vals = np.array([graph.node_attrs[o[-1]] for o in occs])
                parts.extend(vals.mean(axis=0))
            else:
                parts.extend([0.0] * node_attr_dim)
        if s >= 2 and edge_attr_dim:
            if count:
                rows = []
                for o in occs:
                    u, v = o[-2], o[-1]
                    i = graph.edges.index((min(u, v), max(u, v)))
                    rows.append(graph.edge_attrs[i])
                parts.extend(np.array(rows).mean(axis=0))
            else:
                parts.extend([0.0] * edge_attr_dim)
    return np.array(parts)


def brute_best_split(x, r, min_leaf=1):
    """Exhaustive single-feature split search over one column.

    Returns (best_reduction, threshold) with thresholds at midpoints between
    consecutive distinct sorted values, reduction measured as the drop in sum
    of squared errors around the mean.  Ties resolve to the lowest threshold.
    """
    n = len(r)
    total_sse = float(np.sum((r - np.mean(r)) ** 2))
    best = (0.0, None)
    values = sorted(set(float(v) for v in x))
    for a, b in zip(values, values[1:]):
        thr = (a + b) / 2.0
        left = r[x <= thr]
        right = r[x > thr]
        if len(left) < min_leaf or len(right) < min_leaf:
            continue
        sse = float(np.sum((left - left.mean()) ** 2)) + float(
            np.sum((right - right.mean()) ** 2)
        )
        red = total_sse - sse
        if best[1] is None or red > best[0] + 1e-12:
            best = (red, thr)
    return best


def brute_stump(X, r, min_leaf=1):
    """Exhaustive stump search: best (feature, threshold) over all columns.

    Ties resolve to the lower feature index, then the lower threshold.
    Returns (feature, threshold, reduction) or None when no column splits.
    """
    best = None
    for j in range(X.shape[1]):
        red, thr = brute_best_split(X[:, j], r, min_leaf)
        if thr is None:
            continue
        if best is None or red > best[2] + 1e-12:
            best = (j, thr, red)
    return best


def central_difference(f, x, eps=1e-6):
    return (f(x + eps) - f(x - eps)) / (2.0 * eps)


def logistic_loss_scalar(y, f):
    # log(1 + exp(-f)) + (1 - y) * f, computed stably
    return math.log1p(math.exp(-abs(f))) + max(-f, 0.0) + (1.0 - y) * f


def brute_confusion(y_true, y_pred):
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    return tp, tn, fp, fn


def brute_f1_macro_percent(y_true, y_pred):
    tp, tn, fp, fn = brute_confusion(y_true, y_pred)

    def f1(tp_, fp_, fn_):
        denom = 2 * tp_ + fp_ + fn_
        return 0.0 if denom == 0 else 2.0 * tp_ / denom

    return 100.0 * (f1(tp, fp, fn) + f1(tn, fn, fp)) / 2.0


def random_labelled_graph(rng, max_nodes=12, n_labels=4, node_attr_dim=0, edge_attr_dim=0):
    """Random undirected labelled graph for differential testing."""
    from pathgbm import Graph

    n = int(rng.integers(1, max_nodes + 1))
    labels = rng.integers(0, n_labels, size=n)
    edges = []
    attrs = []
    for u, v in combinations(range(n), 2):
        if rng.random() < 0.35:
            edges.append((u, v))
            attrs.append(rng.normal(size=edge_attr_dim))
    node_attrs = rng.normal(size=(n, node_attr_dim)) if node_attr_dim else None
    edge_attrs = np.array(attrs).reshape(len(edges), edge_attr_dim) if edge_attr_dim else None
    return Graph.build(n, labels, edges, node_attrs=node_attrs, edge_attrs=edge_attrs)
