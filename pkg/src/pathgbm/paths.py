"""Anchored enumeration and counting of labelled-path occurrences.

A labelled path is a tuple of label ids.  An occurrence of the path in a graph
is a sequence of pairwise distinct nodes that starts at an anchor node, whose
consecutive nodes are adjacent and whose labels spell the path.  Two
occurrences are distinct iff their node sequences differ; reversals and
rotations are not identified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LabelledPath = tuple[int, ...]


def _check_path(path: Sequence[int]) -> LabelledPath:
    p = tuple(int(x) for x in path)
    if not p:
        raise ValueError("labelled path must contain at least one label")
    return p


def enumerate_occurrences(graph, anchors: Iterable[int], path: Sequence[int]) -> list[tuple[int, ...]]:
    """All occurrences of ``path`` anchored at ``anchors``, in lexicographic
    order of their node sequences."""
    p = _check_path(path)
    m = len(p)
    adj = graph.adjacency
    labels = graph._label_list
    out: list[tuple[int, ...]] = []
    visited = bytearray(graph.node_count)
    stack: list[int] = []

    def walk(v: int, depth: int) -> None:
        want = p[depth]
        last = depth == m - 1
        for w in adj[v]:
            if visited[w] or labels[w] != want:
                continue
            if last:
                out.append(tuple(stack) + (w,))
            else:
                visited[w] = 1
                stack.append(w)
                walk(w, depth + 1)
                stack.pop()
                visited[w] = 0

    first = p[0]
    for a in sorted(set(int(a) for a in anchors)):
        if not 0 <= a < graph.node_count:
            raise ValueError(f"anchor {a} out of range")
        if labels[a] != first:
            continue
        if m == 1:
            out.append((a,))
            continue
        visited[a] = 1
        stack.append(a)
        walk(a, 1)
        stack.pop()
        visited[a] = 0
    return out


@dataclass(frozen=True)
class PrefixStats:
    """Occurrence counts and attribute sums for every prefix of one path.

    ``counts[s-1]`` is the number of occurrences of the first ``s`` labels.
    ``node_attr_sums[s-1]`` sums the attribute vector of the terminal node
    over those occurrences; ``edge_attr_sums[s-2]`` sums the attributes of the
    last traversed edge (defined for s >= 2 only).  Sums are ``None`` when the
    stats were collected in counting-only mode.
    """

    counts: np.ndarray
    node_attr_sums: np.ndarray | None
    edge_attr_sums: np.ndarray | None


def prefix_stats(graph, anchors: Iterable[int], path: Sequence[int], with_attrs: bool = True) -> PrefixStats:
    """Collect counts (and attribute sums) for all prefixes in one DFS pass.

    The partial search states at depth ``s`` are exactly the occurrences of
    the length-``s`` prefix, so one traversal of the full path's search tree
    covers every prefix.
    """
    p = _check_path(path)
    m = len(p)
    n = graph.node_count
    adj = graph.adjacency
    labels = graph._label_list
    erows = graph._edge_rows

    counts = [0] * m
    node_hits: list[list[int]] = [[] for _ in range(m)]
    edge_hits: list[list[int]] = [[] for _ in range(m - 1)]
    visited = bytearray(n)

    def walk(v: int, depth: int) -> None:
        want = p[depth]
        base = v * n
        deeper = depth + 1 < m
        cnt = 0
        nh = node_hits[depth]
        eh = edge_hits[depth - 1]
        for w in adj[v]:
            if visited[w] or labels[w] != want:
                continue
            cnt += 1
            if with_attrs:
                nh.append(w)
                eh.append(erows[base + w])
            if deeper:
                visited[w] = 1
                walk(w, depth + 1)
                visited[w] = 0
        counts[depth] += cnt

    first = p[0]
    for a in anchors:
        if labels[a] != first:
            continue
        counts[0] += 1
        if with_attrs:
            node_hits[0].append(a)
        if m > 1:
            visited[a] = 1
            walk(a, 1)
            visited[a] = 0

    if not with_attrs:
        return PrefixStats(np.asarray(counts, dtype=np.int64), None, None)

    qv = graph.node_attr_dim
    qe = graph.edge_attr_dim
    node_sums = np.zeros((m, qv))
    edge_sums = np.zeros((m - 1, qe))
    for s in range(m):
        if node_hits[s] and qv:
            node_sums[s] = graph.node_attrs[node_hits[s]].sum(axis=0)
    for s in range(m - 1):
        if edge_hits[s] and qe:
            edge_sums[s] = graph.edge_attrs[edge_hits[s]].sum(axis=0)
    return PrefixStats(np.asarray(counts, dtype=np.int64), node_sums, edge_sums)


def count_occurrences(graph, anchors: Iterable[int], path: Sequence[int]) -> int:
    """Number of occurrences of ``path``, without materialising them."""
    stats = prefix_stats(graph, anchors, path, with_attrs=False)
    return int(stats.counts[-1])


def extension_counts(graph, anchors: Iterable[int], path: Sequence[int]) -> dict[int, int]:
    """Occurrence counts of every one-node extension of ``path``.

    Returns ``{label: count of path + (label,)}`` with zero-count labels
    omitted.  Counted directly from the parent's occurrences: each unvisited
    neighbour of a completed occurrence's terminal node extends it once.
    """
    p = _check_path(path)
    m = len(p)
    adj = graph.adjacency
    labels = graph._label_list
    visited = bytearray(graph.node_count)
    ext: dict[int, int] = {}

    def scan_terminal(w: int) -> None:
        visited[w] = 1
        for z in adj[w]:
            if not visited[z]:
                lz = labels[z]
                ext[lz] = ext.get(lz, 0) + 1
        visited[w] = 0

    def walk(v: int, depth: int) -> None:
        want = p[depth]
        last = depth == m - 1
        for w in adj[v]:
            if visited[w] or labels[w] != want:
                continue
            if last:
                scan_terminal(w)
            else:
                visited[w] = 1
                walk(w, depth + 1)
                visited[w] = 0

    first = p[0]
    for a in anchors:
        if labels[a] != first:
            continue
        if m == 1:
            scan_terminal(a)
        else:
            visited[a] = 1
            walk(a, 1)
            visited[a] = 0
    return ext


def dataset_extension_counts(
    graphs: Sequence, anchor_sets: Sequence[Sequence[int]], path: Sequence[int]
) -> dict[LabelledPath, np.ndarray]:
    """Per-graph occurrence-count columns for every one-node extension seen in
    ``graphs``.  Keys are the extended paths, sorted; values are int64 columns
    aligned to ``graphs``."""
    p = _check_path(path)
    per_graph: list[dict[int, int]] = [
        extension_counts(g, a, p) for g, a in zip(graphs, anchor_sets)
    ]
    labels = sorted(set().union(*per_graph)) if per_graph else []
    out: dict[LabelledPath, np.ndarray] = {}
    for lab in labels:
        col = np.fromiter(
            (d.get(lab, 0) for d in per_graph), dtype=np.int64, count=len(per_graph)
        )
        out[p + (lab,)] = col
    return out


def one_node_extensions(
    graphs: Sequence, anchor_sets: Sequence[Sequence[int]], path: Sequence[int]
) -> list[LabelledPath]:
    """Sorted list of one-node extensions of ``path`` that occur at least once
    across ``graphs``."""
    return sorted(dataset_extension_counts(graphs, anchor_sets, path))
