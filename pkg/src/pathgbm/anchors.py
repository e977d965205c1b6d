"""Anchor-node policies: which nodes may start a path occurrence.

Columns are indexed dataset-wide: 0 is the node-label column, ``j`` in
``1..node_attr_dim`` is node-attribute column ``j - 1``.  In automatic mode
the categorical column with the most classes becomes the matching alphabet
and every node anchors; in user mode anchoring is restricted to nodes whose
label is in a user-given set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graphs import Dataset
from .tudata import format_value

log = logging.getLogger(__name__)

DEFAULT_CATEGORICAL_THRESHOLD = 200


@dataclass(frozen=True)
class AnchorConfig:
    """How anchor nodes are chosen.

    mode:                  "automatic" or "user".
    user_labels:           label ids allowed to anchor (user mode only).
    categorical_threshold: a column is categorical when its distinct-value
                           count stays below this.
    rare_top_k:            in automatic mode, restrict anchoring to the k
                           rarest labels of the matching alphabet.
    """

    mode: str = "automatic"
    user_labels: frozenset[int] | None = None
    categorical_threshold: int = DEFAULT_CATEGORICAL_THRESHOLD
    rare_top_k: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("automatic", "user"):
            raise ValueError(f"unknown anchor mode {self.mode!r}")
        if self.mode == "user" and not self.user_labels:
            raise ValueError("user anchor mode needs a non-empty label set")
        if self.categorical_threshold < 2:
            raise ValueError("categorical threshold must be at least 2")
        if self.rare_top_k is not None and self.rare_top_k < 1:
            raise ValueError("rare_top_k must be positive")


def _column_values(ds: Dataset, index: int) -> np.ndarray:
    if index == 0:
        return np.concatenate([g.node_labels for g in ds.graphs]) if ds.graphs else np.zeros(0)
    if not 1 <= index <= ds.node_attr_dim:
        raise ValueError(f"column index {index} outside 0..{ds.node_attr_dim}")
    return (
        np.concatenate([g.node_attrs[:, index - 1] for g in ds.graphs])
        if ds.graphs
        else np.zeros(0)
    )


def detect_categorical_columns(ds: Dataset, threshold: int = DEFAULT_CATEGORICAL_THRESHOLD) -> dict[int, int]:
    """Map column index to distinct-value count, for columns under the
    threshold.  Column 0 is the node-label column."""
    out: dict[int, int] = {}
    for j in range(ds.node_attr_dim + 1):
        classes = len(np.unique(_column_values(ds, j)))
        if classes < threshold:
            out[j] = classes
    return out


def select_anchor_attribute(ds: Dataset, cfg: AnchorConfig) -> int:
    """Pick the matching-alphabet column for automatic mode.

    The categorical column with the most classes wins; ties go to the lowest
    index.  When nothing falls under the threshold the node-label column is
    used anyway, with a warning.
    """
    candidates = detect_categorical_columns(ds, cfg.categorical_threshold)
    if not candidates:
        log.warning(
            "no column has fewer than %d distinct values; matching on node labels",
            cfg.categorical_threshold,
        )
        return 0
    best = max(sorted(candidates), key=lambda j: candidates[j])
    return best


def with_anchor_attribute(ds: Dataset, index: int) -> Dataset:
    """Recode node labels from column ``index``; 0 returns ``ds`` unchanged.

    The code alphabet is the dataset-wide sorted distinct values of the
    column, so every graph shares one encoding.
    """
    if index == 0:
        return ds
    values = np.unique(_column_values(ds, index))
    code_of = {float(v): i for i, v in enumerate(values)}
    from .graphs import Graph, _readonly

    graphs = []
    for g in ds.graphs:
        codes = np.array(
            [code_of[float(v)] for v in g.node_attrs[:, index - 1]], dtype=np.int64
        )
        graphs.append(
            Graph(
                adjacency=g.adjacency,
                node_labels=_readonly(codes),
                node_attrs=g.node_attrs,
                edges=g.edges,
                edge_attrs=g.edge_attrs,
            )
        )
    return Dataset(
        name=ds.name,
        graphs=tuple(graphs),
        targets=ds.targets,
        label_alphabet=tuple(format_value(v) for v in values),
        node_attr_dim=ds.node_attr_dim,
        edge_attr_dim=ds.edge_attr_dim,
    )


def rare_label_filter(ds: Dataset, k: int) -> frozenset[int]:
    """Ids of the ``k`` least frequent labels, by node count over ``ds``.

    Frequency ties resolve to the smaller id; ``k`` beyond the alphabet size
    is clamped with a warning.
    """
    if k < 1:
        raise ValueError("k must be positive")
    counts = np.zeros(len(ds.label_alphabet), dtype=np.int64)
    for g in ds.graphs:
        counts += np.bincount(g.node_labels, minlength=len(counts))
    if k > len(counts):
        log.warning(
            "rare_top_k=%d exceeds the %d-label alphabet; using all labels", k, len(counts)
        )
        k = len(counts)
    order = sorted(range(len(counts)), key=lambda i: (counts[i], i))
    return frozenset(order[:k])


def resolve_allowed_labels(ds: Dataset, cfg: AnchorConfig) -> frozenset[int] | None:
    """Label ids allowed to anchor under ``cfg``; ``None`` means all."""
    if cfg.mode == "user":
        bad = [i for i in cfg.user_labels if not 0 <= i < len(ds.label_alphabet)]
        if bad:
            raise ValueError(f"user anchor label ids {sorted(bad)} outside the alphabet")
        return frozenset(cfg.user_labels)
    if cfg.rare_top_k is not None:
        return rare_label_filter(ds, cfg.rare_top_k)
    return None


def anchor_nodes(graph, allowed_labels: frozenset[int] | None = None) -> tuple[int, ...]:
    """Anchor node ids of one graph, ascending; all nodes when unrestricted."""
    if allowed_labels is None:
        return tuple(range(graph.node_count))
    labels = graph.node_labels
    return tuple(int(v) for v in np.flatnonzero(np.isin(labels, list(allowed_labels))))


def anchor_sets(ds: Dataset, allowed_labels: frozenset[int] | None = None) -> tuple[tuple[int, ...], ...]:
    """Per-graph anchor tuples for the whole dataset."""
    return tuple(anchor_nodes(g, allowed_labels) for g in ds.graphs)
