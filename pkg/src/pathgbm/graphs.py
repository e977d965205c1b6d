"""Immutable labelled-graph and dataset containers used by every other module.

A graph carries one categorical label and one real attribute vector per node,
plus one real attribute vector per undirected edge.  Labels are dense integer
ids into a dataset-wide alphabet; the alphabet itself lives on the dataset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with labelled nodes and attributed nodes/edges.

    Construct through :meth:`build`, which canonicalises the edge list and
    checks basic sanity.  The raw constructor performs no checks; tests use it
    to assemble deliberately broken graphs for ``validate_graph``.

    Fields
    ------
    adjacency:   per-node tuple of neighbour ids, sorted ascending.
    node_labels: (n,) int64 label ids.
    node_attrs:  (n, node_attr_dim) float64, read-only.
    edges:       canonical undirected edge list, each edge once as (u, v) with
                 u < v, sorted lexicographically.
    edge_attrs:  (len(edges), edge_attr_dim) float64, rows aligned to edges.
    """

    adjacency: tuple[tuple[int, ...], ...]
    node_labels: np.ndarray
    node_attrs: np.ndarray
    edges: tuple[tuple[int, int], ...]
    edge_attrs: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.adjacency)
        rows: dict[int, int] = {}
        for i, (u, v) in enumerate(self.edges):
            rows[u * n + v] = i
            rows[v * n + u] = i
        # Private caches for the path engine; plain Python types keep the
        # inner DFS free of numpy scalar overhead.
        object.__setattr__(self, "_edge_rows", rows)
        object.__setattr__(self, "_label_list", [int(x) for x in self.node_labels])

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def node_attr_dim(self) -> int:
        return self.node_attrs.shape[1]

    @property
    def edge_attr_dim(self) -> int:
        return self.edge_attrs.shape[1]

    @classmethod
    def build(
        cls,
        node_count: int,
        node_labels: Sequence[int],
        edges: Iterable[tuple[int, int]] = (),
        node_attrs: np.ndarray | None = None,
        edge_attrs: np.ndarray | None = None,
    ) -> "Graph":
        """Assemble a graph from an undirected edge list (each edge once).

        Endpoint order within an input edge does not matter.  Duplicate edges
        are rejected unless their attribute vectors are identical, in which
        case they collapse to one edge.  Self loops are rejected.
        """
        if node_count < 0:
            raise ValueError("node_count must be >= 0")
        labels = np.asarray(node_labels, dtype=np.int64)
        if labels.shape != (node_count,):
            raise ValueError(
                f"expected {node_count} node labels, got shape {labels.shape}"
            )
        if node_attrs is None:
            node_attrs = np.zeros((node_count, 0))
        node_attrs = np.asarray(node_attrs, dtype=np.float64)
        if node_attrs.ndim != 2 or node_attrs.shape[0] != node_count:
            raise ValueError(
                f"node_attrs must be (node_count, dim), got {node_attrs.shape}"
            )

        edge_list = [(int(u), int(v)) for u, v in edges]
        if edge_attrs is None:
            edge_attrs = np.zeros((len(edge_list), 0))
        edge_attrs = np.asarray(edge_attrs, dtype=np.float64)
        if edge_attrs.ndim != 2 or edge_attrs.shape[0] != len(edge_list):
            raise ValueError(
                f"edge_attrs must have one row per edge, got {edge_attrs.shape}"
            )

        seen: dict[tuple[int, int], int] = {}
        keep: list[tuple[int, int]] = []
        keep_rows: list[int] = []
        for i, (u, v) in enumerate(edge_list):
            if u == v:
                raise ValueError(f"self loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (u, v) if u < v else (v, u)
            j = seen.get(key)
            if j is not None:
                if not np.array_equal(edge_attrs[i], edge_attrs[keep_rows[j]]):
                    raise ValueError(
                        f"duplicate edge ({key[0]}, {key[1]}) with conflicting attributes"
                    )
                continue
            seen[key] = len(keep)
            keep.append(key)
            keep_rows.append(i)

        order = sorted(range(len(keep)), key=lambda i: keep[i])
        canon = tuple(keep[i] for i in order)
        attrs = edge_attrs[[keep_rows[i] for i in order]]

        nbrs: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in canon:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adjacency = tuple(tuple(sorted(ns)) for ns in nbrs)

        return cls(
            adjacency=adjacency,
            node_labels=_readonly(labels),
            node_attrs=_readonly(node_attrs),
            edges=canon,
            edge_attrs=_readonly(attrs),
        )

    def equals(self, other: "Graph") -> bool:
        return (
            self.adjacency == other.adjacency
            and np.array_equal(self.node_labels, other.node_labels)
            and np.array_equal(self.node_attrs, other.node_attrs)
            and self.edges == other.edges
            and np.array_equal(self.edge_attrs, other.edge_attrs)
        )


def neighbors(graph: Graph, node: int) -> tuple[int, ...]:
    """Sorted neighbour ids of ``node``."""
    if not 0 <= node < graph.node_count:
        raise ValueError(f"node {node} out of range for graph with {graph.node_count} nodes")
    return graph.adjacency[node]


def edge_attributes(graph: Graph, u: int, v: int) -> np.ndarray:
    """Attribute vector of the undirected edge (u, v)."""
    for node in (u, v):
        if not 0 <= node < graph.node_count:
            raise ValueError(f"node {node} out of range")
    row = graph._edge_rows.get(u * graph.node_count + v)
    if row is None:
        raise ValueError(f"no edge between {u} and {v}")
    return graph.edge_attrs[row]


def validate_graph(
    graph: Graph,
    node_attr_dim: int | None = None,
    edge_attr_dim: int | None = None,
) -> list[str]:
    """Check structural invariants; return human-readable violation messages.

    An empty list means the graph is well formed.  When the expected attribute
    dimensions are given, mismatches against them are reported as well.
    """
    problems: list[str] = []
    n = graph.node_count

    if graph.node_labels.shape != (n,):
        problems.append(
            f"node_labels shape {graph.node_labels.shape} does not match {n} nodes"
        )
    if graph.node_attrs.ndim != 2 or graph.node_attrs.shape[0] != n:
        problems.append(f"node_attrs shape {graph.node_attrs.shape} does not match {n} nodes")
    elif node_attr_dim is not None and graph.node_attrs.shape[1] != node_attr_dim:
        problems.append(
            f"node attribute length {graph.node_attrs.shape[1]} differs from dataset value {node_attr_dim}"
        )

    edge_keys = set()
    for u, v in graph.edges:
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge ({u}, {v}) out of range")
            continue
        if u >= v:
            problems.append(f"edge ({u}, {v}) not in canonical (u < v) order")
        edge_keys.add((min(u, v), max(u, v)))

    if graph.edge_attrs.ndim != 2 or graph.edge_attrs.shape[0] != len(graph.edges):
        problems.append(
            f"edge_attrs has {graph.edge_attrs.shape[0]} rows for {len(graph.edges)} edges"
        )
    elif edge_attr_dim is not None and graph.edge_attrs.shape[1] != edge_attr_dim:
        problems.append(
            f"edge attribute length {graph.edge_attrs.shape[1]} differs from dataset value {edge_attr_dim}"
        )

    adj_keys = set()
    for u, ns in enumerate(graph.adjacency):
        prev = -1
        for v in ns:
            if not 0 <= v < n:
                problems.append(f"neighbour {v} of node {u} out of range")
                continue
            if v == u:
                problems.append(f"self loop at node {u}")
            if v == prev:
                problems.append(f"duplicate neighbour {v} of node {u}")
            elif v < prev:
                problems.append(f"neighbours of node {u} not sorted")
            prev = v
            if u not in graph.adjacency[v]:
                problems.append(f"asymmetric adjacency: {u} lists {v} but not vice versa")
            adj_keys.add((min(u, v), max(u, v)))

    for key in sorted(adj_keys - edge_keys):
        problems.append(f"edge {key} present in adjacency but has no attribute row")
    for key in sorted(edge_keys - adj_keys):
        problems.append(f"edge {key} has attributes but is missing from adjacency")

    return problems


@dataclass(frozen=True, eq=False)
class Dataset:
    """A named collection of graphs with one prediction target per graph.

    ``targets`` holds 0/1 class indicators for classification tasks and real
    values for regression.  ``label_alphabet`` maps label ids back to the raw
    label names found in the source files.
    """

    name: str
    graphs: tuple[Graph, ...]
    targets: np.ndarray
    label_alphabet: tuple[str, ...]
    node_attr_dim: int
    edge_attr_dim: int
    load_report: dict | None = None

    @property
    def graph_count(self) -> int:
        return len(self.graphs)

    def subset(self, indices: Sequence[int], name: str | None = None) -> "Dataset":
        idx = [int(i) for i in indices]
        return Dataset(
            name=name if name is not None else self.name,
            graphs=tuple(self.graphs[i] for i in idx),
            targets=_readonly(self.targets[idx]),
            label_alphabet=self.label_alphabet,
            node_attr_dim=self.node_attr_dim,
            edge_attr_dim=self.edge_attr_dim,
        )

    def validate(self) -> list[str]:
        problems: list[str] = []
        if self.targets.shape != (self.graph_count,):
            problems.append(
                f"targets shape {self.targets.shape} does not match {self.graph_count} graphs"
            )
        for gi, g in enumerate(self.graphs):
            for msg in validate_graph(g, self.node_attr_dim, self.edge_attr_dim):
                problems.append(f"graph {gi}: {msg}")
            if g.node_count and (
                g.node_labels.min() < 0 or g.node_labels.max() >= len(self.label_alphabet)
            ):
                problems.append(f"graph {gi}: node label outside alphabet")
        return problems

    def equals(self, other: "Dataset") -> bool:
        return (
            self.name == other.name
            and self.graph_count == other.graph_count
            and np.array_equal(self.targets, other.targets)
            and self.label_alphabet == other.label_alphabet
            and self.node_attr_dim == other.node_attr_dim
            and self.edge_attr_dim == other.edge_attr_dim
            and all(a.equals(b) for a, b in zip(self.graphs, other.graphs))
        )
