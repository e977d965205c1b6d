"""Reader and writer for the TUDataset text layout.

A dataset ``NAME`` is a directory of plain-text files: ``NAME_A.txt`` holds
directed edge lines (``u, v`` with 1-based global node ids, undirected edges
appearing in both directions), ``NAME_graph_indicator.txt`` maps each node to
its 1-based graph id, and optional files add node labels, node attributes,
edge labels, edge attributes, graph labels and graph attributes.  Edge labels
and edge attributes merge into one edge-attribute matrix, label first.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import Dataset, Graph, _readonly


class LoadError(Exception):
    """Raised for unreadable, malformed or inconsistent dataset files."""


def format_value(v: float) -> str:
    """Canonical text form of a number: integers without a trailing .0."""
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def _read_matrix(path: Path) -> np.ndarray:
    """Parse a whitespace/comma separated numeric file into a float matrix.

    Bulk-parses the whole file; on failure, re-reads line by line so the
    error message can name the offending line.
    """
    try:
        text = path.read_text()
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in lines if ln]
    if not rows:
        raise LoadError(f"{path.name}: file is empty")
    ncols = len(rows[0].replace(",", " ").split())
    flat = text.replace(",", " ").split()
    if len(flat) == ncols * len(rows):
        try:
            return np.asarray(flat, dtype=np.float64).reshape(len(rows), ncols)
        except ValueError:
            pass
    lineno = 0
    for ln in lines:
        lineno += 1
        if not ln:
            continue
        tokens = ln.replace(",", " ").split()
        if len(tokens) != ncols:
            raise LoadError(
                f"{path.name}, line {lineno}: expected {ncols} values, found {len(tokens)}"
            )
        try:
            [float(t) for t in tokens]
        except ValueError:
            raise LoadError(f"{path.name}, line {lineno}: non-numeric value") from None
    raise LoadError(f"{path.name}: malformed numeric data")


def _expect_rows(path: Path, matrix: np.ndarray, want: int, what: str) -> None:
    if matrix.shape[0] != want:
        raise LoadError(
            f"{path.name}: {matrix.shape[0]} lines for {want} {what}"
        )


def _resolve_dir(directory: str | os.PathLike, name: str) -> Path:
    base = Path(directory)
    for cand in (base, base / name, base / name / "raw"):
        if (cand / f"{name}_A.txt").exists():
            return cand
    raise LoadError(
        f"{name}_A.txt not found under {base} (also tried {base / name})"
    )


def load_dataset(
    directory: str | os.PathLike,
    name: str | None = None,
    task: str = "classification",
    target_index: int = 0,
) -> Dataset:
    """Load a TUDataset-format directory into a :class:`Dataset`.

    Classification targets come from ``NAME_graph_labels.txt`` and are mapped
    onto {0, 1} by sorted raw value; regression targets come from column
    ``target_index`` of ``NAME_graph_attributes.txt``.
    """
    if task not in ("classification", "regression"):
        raise LoadError(f"unknown task {task!r}")
    if name is None:
        name = Path(directory).name
    d = _resolve_dir(directory, name)

    def optional(suffix: str) -> Path | None:
        p = d / f"{name}_{suffix}.txt"
        return p if p.exists() else None

    ind_path = optional("graph_indicator")
    if ind_path is None:
        raise LoadError(f"{name}_graph_indicator.txt not found under {d}")
    indicator = _read_matrix(ind_path)
    if indicator.shape[1] != 1:
        raise LoadError(f"{ind_path.name}: expected one graph id per line")
    indicator = indicator[:, 0].astype(np.int64)
    n_nodes = indicator.shape[0]
    graph_ids = np.unique(indicator)
    n_graphs = graph_ids.shape[0]
    if graph_ids[0] != 1 or graph_ids[-1] != n_graphs:
        raise LoadError(
            f"{ind_path.name}: graph ids must be contiguous starting at 1"
        )

    a_path = d / f"{name}_A.txt"
    a = _read_matrix(a_path)
    if a.shape[1] != 2:
        raise LoadError(f"{a_path.name}: expected two node ids per line")
    a = a.astype(np.int64) - 1
    if a.size and (a.min() < 0 or a.max() >= n_nodes):
        raise LoadError(f"{a_path.name}: node id outside 1..{n_nodes}")
    n_edge_lines = a.shape[0]

    nl_path = optional("node_labels")
    if nl_path is not None:
        raw_labels = _read_matrix(nl_path)
        if raw_labels.shape[1] != 1:
            raise LoadError(f"{nl_path.name}: expected one label per line")
        _expect_rows(nl_path, raw_labels, n_nodes, "nodes")
        raw_labels = raw_labels[:, 0]
    else:
        raw_labels = np.zeros(n_nodes)

    na_path = optional("node_attributes")
    if na_path is not None:
        node_attrs = _read_matrix(na_path)
        _expect_rows(na_path, node_attrs, n_nodes, "nodes")
    else:
        node_attrs = np.zeros((n_nodes, 0))

    edge_cols = []
    el_path = optional("edge_labels")
    if el_path is not None:
        el = _read_matrix(el_path)
        if el.shape[1] != 1:
            raise LoadError(f"{el_path.name}: expected one label per line")
        _expect_rows(el_path, el, n_edge_lines, "edge lines")
        edge_cols.append(el)
    ea_path = optional("edge_attributes")
    if ea_path is not None:
        ea = _read_matrix(ea_path)
        _expect_rows(ea_path, ea, n_edge_lines, "edge lines")
        edge_cols.append(ea)
    edge_feats = (
        np.hstack(edge_cols) if edge_cols else np.zeros((n_edge_lines, 0))
    )

    # targets
    report: dict = {
        "directory": str(d),
        "task": task,
        "graphs": n_graphs,
        "nodes": n_nodes,
        "edge_lines": n_edge_lines,
        "has_node_labels": nl_path is not None,
        "has_node_attributes": na_path is not None,
        "has_edge_labels": el_path is not None,
        "has_edge_attributes": ea_path is not None,
    }
    if task == "classification":
        gl_path = optional("graph_labels")
        if gl_path is None:
            raise LoadError(
                f"{name}_graph_labels.txt not found under {d} (required for classification)"
            )
        gl = _read_matrix(gl_path)
        if gl.shape[1] != 1:
            raise LoadError(f"{gl_path.name}: expected one label per line")
        _expect_rows(gl_path, gl, n_graphs, "graphs")
        raw_targets = gl[:, 0]
        classes = sorted(set(raw_targets.tolist()))
        if len(classes) > 2:
            raise LoadError(
                f"{gl_path.name}: {len(classes)} distinct labels, expected a binary task"
            )
        mapping = {c: i for i, c in enumerate(classes)}
        targets = np.array([mapping[v] for v in raw_targets], dtype=np.float64)
        report["class_mapping"] = {format_value(c): i for c, i in mapping.items()}
    else:
        ga_path = optional("graph_attributes")
        if ga_path is None:
            raise LoadError(
                f"{name}_graph_attributes.txt not found under {d} (required for regression)"
            )
        ga = _read_matrix(ga_path)
        _expect_rows(ga_path, ga, n_graphs, "graphs")
        if not 0 <= target_index < ga.shape[1]:
            raise LoadError(
                f"{ga_path.name}: target index {target_index} outside 0..{ga.shape[1] - 1}"
            )
        targets = ga[:, target_index]
        report["target_index"] = target_index
        report["target_columns"] = int(ga.shape[1])

    # label alphabet over the whole dataset, sorted by raw value
    alphabet_values = sorted(set(raw_labels.tolist()))
    code_of = {v: i for i, v in enumerate(alphabet_values)}
    codes = np.array([code_of[v] for v in raw_labels], dtype=np.int64)
    alphabet = tuple(format_value(v) for v in alphabet_values)

    # per-graph assembly
    node_graph = indicator - 1
    local_index = np.zeros(n_nodes, dtype=np.int64)
    counts = np.zeros(n_graphs, dtype=np.int64)
    members: list[list[int]] = [[] for _ in range(n_graphs)]
    for v in range(n_nodes):
        g = node_graph[v]
        local_index[v] = counts[g]
        counts[g] += 1
        members[g].append(v)

    per_graph_edges: list[list[tuple[int, int]]] = [[] for _ in range(n_graphs)]
    per_graph_rows: list[list[int]] = [[] for _ in range(n_graphs)]
    for i in range(n_edge_lines):
        u, v = int(a[i, 0]), int(a[i, 1])
        gu, gv = node_graph[u], node_graph[v]
        if gu != gv:
            raise LoadError(
                f"{a_path.name}, line {i + 1}: edge joins graph {gu + 1} and graph {gv + 1}"
            )
        per_graph_edges[gu].append((int(local_index[u]), int(local_index[v])))
        per_graph_rows[gu].append(i)

    graphs = []
    undirected_edges = 0
    for g in range(n_graphs):
        idx = members[g]
        try:
            graph = Graph.build(
                counts[g],
                codes[idx],
                per_graph_edges[g],
                node_attrs=node_attrs[idx],
                edge_attrs=edge_feats[per_graph_rows[g]],
            )
        except ValueError as exc:
            raise LoadError(f"{name}, graph {g + 1}: {exc}") from exc
        graphs.append(graph)
        undirected_edges += graph.edge_count

    report["undirected_edges"] = undirected_edges
    return Dataset(
        name=name,
        graphs=tuple(graphs),
        targets=_readonly(targets),
        label_alphabet=alphabet,
        node_attr_dim=int(node_attrs.shape[1]),
        edge_attr_dim=int(edge_feats.shape[1]),
        load_report=report,
    )


def write_dataset(
    ds: Dataset,
    directory: str | os.PathLike,
    name: str | None = None,
    task: str = "classification",
) -> Path:
    """Write ``ds`` back out in the TUDataset text layout.

    Node labels are written as their alphabet names, so the names must be
    numeric for the files to round-trip.  Edge attributes go to a single
    ``_edge_attributes.txt`` regardless of how they were split on load.
    """
    if name is None:
        name = ds.name
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)

    try:
        label_values = [float(s) for s in ds.label_alphabet]
    except ValueError:
        raise ValueError(
            "cannot serialise a dataset whose label names are not numeric"
        ) from None

    a_lines: list[str] = []
    ind_lines: list[str] = []
    nl_lines: list[str] = []
    na_lines: list[str] = []
    ea_lines: list[str] = []
    offset = 0
    for gi, g in enumerate(ds.graphs):
        for v in range(g.node_count):
            ind_lines.append(str(gi + 1))
            nl_lines.append(format_value(label_values[int(g.node_labels[v])]))
            if ds.node_attr_dim:
                na_lines.append(
                    ", ".join(repr(float(x)) for x in g.node_attrs[v])
                )
        for ei, (u, v) in enumerate(g.edges):
            for s, t in ((u, v), (v, u)):
                a_lines.append(f"{offset + s + 1}, {offset + t + 1}")
                if ds.edge_attr_dim:
                    ea_lines.append(
                        ", ".join(repr(float(x)) for x in g.edge_attrs[ei])
                    )
        offset += g.node_count

    def dump(suffix: str, lines: list[str]) -> None:
        (d / f"{name}_{suffix}.txt").write_text("\n".join(lines) + "\n")

    dump("A", a_lines)
    dump("graph_indicator", ind_lines)
    dump("node_labels", nl_lines)
    if ds.node_attr_dim:
        dump("node_attributes", na_lines)
    if ds.edge_attr_dim:
        dump("edge_attributes", ea_lines)
    if task == "classification":
        dump("graph_labels", [format_value(t) for t in ds.targets])
    else:
        dump("graph_attributes", [repr(float(t)) for t in ds.targets])
    return d


@dataclass(frozen=True)
class DatasetSummary:
    """Headline numbers for one loaded dataset."""

    name: str
    graph_count: int
    avg_nodes: float
    avg_edges: float
    node_label_classes: int
    node_feature_count: int
    edge_feature_count: int
    class_percentages: dict[int, float] | None


def dataset_summary(ds: Dataset, task: str = "classification") -> DatasetSummary:
    """Per-dataset statistics: sizes, feature counts and class balance.

    Node features count the label column plus attribute columns; edge features
    count the merged edge-attribute columns.
    """
    n = ds.graph_count
    avg_nodes = float(np.mean([g.node_count for g in ds.graphs])) if n else 0.0
    avg_edges = float(np.mean([g.edge_count for g in ds.graphs])) if n else 0.0
    if task == "classification" and n:
        values, counts = np.unique(ds.targets.astype(np.int64), return_counts=True)
        pct = {int(v): 100.0 * c / n for v, c in zip(values, counts)}
    else:
        pct = None
    return DatasetSummary(
        name=ds.name,
        graph_count=n,
        avg_nodes=avg_nodes,
        avg_edges=avg_edges,
        node_label_classes=len(ds.label_alphabet),
        node_feature_count=1 + ds.node_attr_dim,
        edge_feature_count=ds.edge_attr_dim,
        class_percentages=pct,
    )
