"""Path-derived feature construction.

Selecting a path for a boosting stage expands it into an extended feature
vector: for every prefix, the occurrence count, the mean attribute vector of
the terminal node over the prefix's occurrences, and (from the second prefix
on) the mean attribute vector of the last traversed edge.  Prefixes without
occurrences contribute zeros.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import Sequence

import numpy as np

from .graphs import Graph
from .paths import (
    LabelledPath,
    _check_path,
    dataset_extension_counts,
    enumerate_occurrences,
    prefix_stats,
)

PHI_CACHE_ENTRIES = 96
COLUMN_CACHE_ENTRIES = 8192
EXTENSION_CACHE_ENTRIES = 64


def prefixes(path: Sequence[int]) -> list[LabelledPath]:
    """All prefixes of ``path``, shortest first."""
    p = _check_path(path)
    return [p[:s] for s in range(1, len(p) + 1)]


def feature_row_length(m: int, node_attr_dim: int, edge_attr_dim: int) -> int:
    """Width of the extended feature vector for a length-``m`` path."""
    if m < 1:
        raise ValueError("path length must be at least 1")
    return m + node_attr_dim + (m - 1) * (node_attr_dim + edge_attr_dim)


def averaged_node_attributes(graph: Graph, occurrences: Sequence[tuple[int, ...]], s: int) -> np.ndarray:
    """Mean attribute vector of the ``s``-th node over the given occurrences.

    Zero vector when there are no occurrences.
    """
    if s < 1:
        raise ValueError("prefix length must be at least 1")
    if not occurrences:
        return np.zeros(graph.node_attr_dim)
    nodes = [occ[s - 1] for occ in occurrences]
    return graph.node_attrs[nodes].mean(axis=0)


def averaged_edge_attributes(graph: Graph, occurrences: Sequence[tuple[int, ...]], s: int) -> np.ndarray:
    """Mean attribute vector of the edge entering the ``s``-th node.

    Defined for ``s >= 2`` only; zero vector when there are no occurrences.
    """
    if s < 2:
        raise ValueError("edge averages need a prefix of length at least 2")
    if not occurrences:
        return np.zeros(graph.edge_attr_dim)
    n = graph.node_count
    rows = [graph._edge_rows[occ[s - 2] * n + occ[s - 1]] for occ in occurrences]
    return graph.edge_attrs[rows].mean(axis=0)


def extended_feature_row(
    graph: Graph, anchors: Sequence[int], path: Sequence[int], restricted: bool = False
) -> np.ndarray:
    """Extended feature vector of one path in one graph.

    Layout is prefix-major: for prefix length ``s`` the occurrence count, then
    the averaged node attributes, then (s >= 2) the averaged edge attributes.
    ``restricted`` keeps only the counts, one per prefix.
    """
    p = _check_path(path)
    m = len(p)
    if restricted:
        stats = prefix_stats(graph, anchors, p, with_attrs=False)
        return stats.counts.astype(np.float64)
    stats = prefix_stats(graph, anchors, p, with_attrs=True)
    qv = graph.node_attr_dim
    qe = graph.edge_attr_dim
    row = np.zeros(feature_row_length(m, qv, qe))
    pos = 0
    for s in range(1, m + 1):
        c = stats.counts[s - 1]
        row[pos] = c
        pos += 1
        if qv:
            if c:
                row[pos : pos + qv] = stats.node_attr_sums[s - 1] / c
            pos += qv
        if s >= 2 and qe:
            if c:
                row[pos : pos + qe] = stats.edge_attr_sums[s - 2] / c
            pos += qe
    return row


def feature_row_names(path_names: Sequence[str], node_attr_dim: int, edge_attr_dim: int) -> list[str]:
    """Column names matching the extended feature layout."""
    names: list[str] = []
    for s in range(1, len(path_names) + 1):
        prefix = "-".join(path_names[:s])
        names.append(f"{prefix}|count")
        names.extend(f"{prefix}|node_attr{j}" for j in range(node_attr_dim))
        if s >= 2:
            names.extend(f"{prefix}|edge_attr{j}" for j in range(edge_attr_dim))
    return names


class CountMatrix:
    """Append-only matrix of per-graph occurrence counts, one column per path.

    Appending new paths never reorders or rewrites existing columns.
    """

    def __init__(self, n_rows: int):
        self.n_rows = n_rows
        self.paths: list[LabelledPath] = []
        self._cols: list[np.ndarray] = []
        self._index: dict[LabelledPath, int] = {}

    def __contains__(self, path: LabelledPath) -> bool:
        return path in self._index

    @property
    def n_cols(self) -> int:
        return len(self._cols)

    def column(self, path: LabelledPath) -> np.ndarray:
        return self._cols[self._index[path]]

    def append(self, path: LabelledPath, column: np.ndarray) -> int:
        if path in self._index:
            raise ValueError(f"path {path} already present")
        column = np.asarray(column, dtype=np.int64)
        if column.shape != (self.n_rows,):
            raise ValueError(
                f"column shape {column.shape} does not match {self.n_rows} rows"
            )
        self._index[path] = len(self._cols)
        self._cols.append(column)
        self.paths.append(path)
        return len(self._cols) - 1

    @property
    def values(self) -> np.ndarray:
        if not self._cols:
            return np.zeros((self.n_rows, 0), dtype=np.int64)
        return np.column_stack(self._cols)


def build_count_matrix(
    graphs: Sequence[Graph],
    anchor_sets: Sequence[Sequence[int]],
    paths: Sequence[Sequence[int]],
) -> CountMatrix:
    """Occurrence-count matrix of ``paths`` (columns) over ``graphs`` (rows)."""
    mat = CountMatrix(len(graphs))
    for path in paths:
        p = _check_path(path)
        col = np.fromiter(
            (
                prefix_stats(g, a, p, with_attrs=False).counts[-1]
                for g, a in zip(graphs, anchor_sets)
            ),
            dtype=np.int64,
            count=len(graphs),
        )
        mat.append(p, col)
    return mat


class _LRU(OrderedDict):
    def __init__(self, maxsize: int):
        super().__init__()
        self.maxsize = maxsize

    def get_or(self, key, build):
        if key in self:
            self.move_to_end(key)
            return self[key]
        value = build()
        self[key] = value
        if len(self) > self.maxsize:
            self.popitem(last=False)
        return value


class FeatureCache:
    """Per-dataset store of count columns and extended feature matrices.

    Bound to one dataset and one anchor policy, it lets repeated trainings
    (cross-validation folds, grid points) reuse path work: columns and
    matrices cover all graphs and callers slice out the rows they need.
    """

    def __init__(
        self,
        graphs: Sequence[Graph],
        anchor_sets: Sequence[Sequence[int]],
        n_labels: int,
        node_attr_dim: int,
        edge_attr_dim: int,
    ):
        self.graphs = tuple(graphs)
        self.anchor_sets = tuple(tuple(a) for a in anchor_sets)
        self.n_labels = n_labels
        self.node_attr_dim = node_attr_dim
        self.edge_attr_dim = edge_attr_dim
        self._label_cols: np.ndarray | None = None
        self._columns = _LRU(COLUMN_CACHE_ENTRIES)
        self._extensions = _LRU(EXTENSION_CACHE_ENTRIES)
        self._phi = _LRU(PHI_CACHE_ENTRIES)

    def label_columns(self) -> np.ndarray:
        """(n_graphs, n_labels) counts of anchors per label."""
        if self._label_cols is None:
            cols = np.zeros((len(self.graphs), self.n_labels), dtype=np.int64)
            for i, (g, a) in enumerate(zip(self.graphs, self.anchor_sets)):
                if a:
                    cols[i] = np.bincount(
                        g.node_labels[list(a)], minlength=self.n_labels
                    )
            self._label_cols = cols
        return self._label_cols

    def count_column(self, path: LabelledPath) -> np.ndarray:
        if len(path) == 1:
            return self.label_columns()[:, path[0]]

        def build():
            return np.fromiter(
                (
                    prefix_stats(g, a, path, with_attrs=False).counts[-1]
                    for g, a in zip(self.graphs, self.anchor_sets)
                ),
                dtype=np.int64,
                count=len(self.graphs),
            )

        return self._columns.get_or(path, build)

    def extension_columns(self, path: LabelledPath) -> dict[LabelledPath, np.ndarray]:
        def build():
            cols = dataset_extension_counts(self.graphs, self.anchor_sets, path)
            for child, col in cols.items():
                if child not in self._columns:
                    self._columns.get_or(child, lambda c=col: c)
            return cols

        return self._extensions.get_or(path, build)

    def phi(self, path: LabelledPath, restricted: bool = False) -> np.ndarray:
        """(n_graphs, D) extended feature matrix for one path, read-only."""

        def build():
            rows = [
                extended_feature_row(g, a, path, restricted=restricted)
                for g, a in zip(self.graphs, self.anchor_sets)
            ]
            mat = np.vstack(rows) if rows else np.zeros((0, 0))
            mat.flags.writeable = False
            return mat

        return self._phi.get_or((path, restricted), build)
