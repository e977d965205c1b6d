"""Gradient tree boosting with a lazily grown pool of labelled-path features.

Each iteration fits a least-squares stump on the path-count matrix to pick
one path, expands that path into its extended feature vector and fits a small
regression tree on it against the pseudo-residuals.  The first time a path is
selected, its one-node extensions found in the training data join the
candidate pool, so the pool grows only where the data has support.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from .anchors import AnchorConfig, anchor_sets, resolve_allowed_labels, select_anchor_attribute, with_anchor_attribute
from .features import FeatureCache, CountMatrix
from .graphs import Dataset, Graph
from .paths import LabelledPath
from .trees import RegressionTree, StumpScanner, fit_tree
from .tudata import LoadError

log = logging.getLogger(__name__)

MODEL_FORMAT = "pathgbm-model"
MODEL_VERSION = 1
LOGIT_CLIP = 36.0


class ConfigError(Exception):
    """Raised for invalid configuration values."""


class ModelError(Exception):
    """Raised for unreadable or malformed model files."""


@dataclass(frozen=True)
class BoostConfig:
    """Training hyperparameters.

    attribute_mode "complete" uses counts plus averaged node/edge attributes
    per prefix; "restricted" keeps the counts only.  All randomness anywhere
    downstream derives from ``seed``.
    """

    task: str = "classification"
    m_stop: int = 300
    eta: float = 0.1
    max_depth: int = 3
    min_leaf: int = 5
    attribute_mode: str = "complete"
    max_path_length: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.task not in ("classification", "regression"):
            raise ConfigError(f"unknown task {self.task!r}")
        if self.m_stop < 1:
            raise ConfigError("m_stop must be at least 1")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError("eta must lie in (0, 1]")
        if self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ConfigError("min_leaf must be >= 1")
        if self.attribute_mode not in ("complete", "restricted"):
            raise ConfigError(f"unknown attribute_mode {self.attribute_mode!r}")
        if self.max_path_length < 1:
            raise ConfigError("max_path_length must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")

    @property
    def restricted(self) -> bool:
        return self.attribute_mode == "restricted"


def sigmoid(f: np.ndarray | float) -> np.ndarray | float:
    clipped = np.clip(f, -LOGIT_CLIP, LOGIT_CLIP)
    return 1.0 / (1.0 + np.exp(-clipped))


def logistic_loss(targets: np.ndarray, logits: np.ndarray) -> np.ndarray:
    """Elementwise negative log-likelihood of 0/1 targets under ``logits``."""
    f = np.clip(logits, -LOGIT_CLIP, LOGIT_CLIP)
    return np.logaddexp(0.0, -f) + (1.0 - targets) * f


def init_intercept(targets: np.ndarray, task: str) -> float:
    """Loss-minimising constant: log-odds of the base rate, or the mean."""
    targets = np.asarray(targets, dtype=np.float64)
    if targets.size == 0:
        raise LoadError("cannot train on an empty dataset")
    if task == "classification":
        p = float(targets.mean())
        if p <= 0.0 or p >= 1.0:
            raise LoadError("training targets contain a single class")
        return math.log(p / (1.0 - p))
    return float(targets.mean())


def pseudo_residuals(targets: np.ndarray, predictions: np.ndarray, task: str) -> np.ndarray:
    """Negative loss gradient at the current predictions.

    ``predictions`` live on the link scale: logits for classification, raw
    values for regression.
    """
    if task == "classification":
        return targets - sigmoid(predictions)
    return targets - predictions


def mean_training_loss(targets: np.ndarray, predictions: np.ndarray, task: str) -> float:
    if task == "classification":
        return float(np.mean(logistic_loss(targets, predictions)))
    return float(0.5 * np.mean((targets - predictions) ** 2))


@dataclass(frozen=True)
class Stage:
    """One boosting stage: the selected path, the tree fit on its extended
    features, and the stump diagnostics recorded at selection time."""

    path: LabelledPath
    tree: RegressionTree
    loss_reduction: float
    relative_reduction: float


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    path: LabelledPath
    train_loss: float
    loss_reduction: float
    relative_reduction: float
    pool_size: int


@dataclass(frozen=True, eq=False)
class PreparedData:
    """A dataset recoded for anchoring, with its shared feature cache."""

    ds: Dataset
    anchor: AnchorConfig
    attr_index: int
    allowed_labels: frozenset[int] | None
    anchor_sets: tuple[tuple[int, ...], ...]
    cache: FeatureCache


@dataclass(frozen=True, eq=False)
class BoostModel:
    """A fitted additive model: intercept plus ``eta``-scaled stage trees."""

    task: str
    f0: float
    eta: float
    config: BoostConfig
    anchor: AnchorConfig
    attr_index: int
    alphabet: tuple[str, ...]
    allowed_labels: frozenset[int] | None
    node_attr_dim: int
    edge_attr_dim: int
    stages: tuple[Stage, ...]
    initial_loss: float = 0.0
    log: tuple[IterationRecord, ...] = ()
    candidate_paths: tuple[LabelledPath, ...] = ()

    def path_name(self, path: LabelledPath) -> str:
        return "-".join(self.alphabet[lab] for lab in path)


def prepare(ds: Dataset, anchor: AnchorConfig) -> PreparedData:
    """Resolve the anchor policy against ``ds`` and build the feature cache."""
    if anchor.mode == "user":
        view = ds
        attr_index = 0
    else:
        attr_index = select_anchor_attribute(ds, anchor)
        view = with_anchor_attribute(ds, attr_index)
    allowed = resolve_allowed_labels(view, anchor)
    sets = anchor_sets(view, allowed)
    cache = FeatureCache(
        view.graphs,
        sets,
        n_labels=len(view.label_alphabet),
        node_attr_dim=view.node_attr_dim,
        edge_attr_dim=view.edge_attr_dim,
    )
    return PreparedData(view, anchor, attr_index, allowed, sets, cache)


def train_prepared(prep: PreparedData, train_idx: np.ndarray, config: BoostConfig) -> BoostModel:
    """Fit a model on the given rows of a prepared dataset."""
    train_idx = np.asarray(train_idx, dtype=np.int64)
    view = prep.ds
    cache = prep.cache
    y = view.targets[train_idx]
    if config.task == "classification":
        bad = set(np.unique(y)) - {0.0, 1.0}
        if bad:
            raise LoadError(f"classification targets must be 0/1, found {sorted(bad)}")
    n = train_idx.shape[0]

    f0 = init_intercept(y, config.task)
    F = np.full(n, f0)
    initial_loss = mean_training_loss(y, F, config.task)

    pool = CountMatrix(n)
    scanner = StumpScanner(n)
    label_cols = cache.label_columns()[train_idx]
    for lab in range(label_cols.shape[1]):
        col = label_cols[:, lab]
        if col.any():
            pool.append((lab,), col)
            scanner.add_column(col)
    if pool.n_cols == 0:
        raise ConfigError(
            "candidate pool is empty: no anchor node occurs in the training data"
        )

    stages: list[Stage] = []
    records: list[IterationRecord] = []
    expanded: set[LabelledPath] = set()

    for m in range(1, config.m_stop + 1):
        r = pseudo_residuals(y, F, config.task)
        stump, second = scanner.scan(r)
        if stump.feature < 0 or stump.sse_reduction <= 0.0:
            log.warning(
                "early stop at iteration %d: no split reduces the squared error", m
            )
            break
        path = pool.paths[stump.feature]
        phi = cache.phi(path, restricted=config.restricted)[train_idx]
        tree = fit_tree(phi, r, config.max_depth, config.min_leaf)
        F = F + config.eta * tree.predict(phi)

        stages.append(
            Stage(
                path=path,
                tree=tree,
                loss_reduction=float(stump.sse_reduction),
                relative_reduction=float(max(stump.sse_reduction - second, 0.0)),
            )
        )
        if path not in expanded:
            expanded.add(path)
            if len(path) < config.max_path_length:
                for child, col in sorted(cache.extension_columns(path).items()):
                    sub = col[train_idx]
                    if child not in pool and sub.any():
                        pool.append(child, sub)
                        scanner.add_column(sub)
        records.append(
            IterationRecord(
                iteration=m,
                path=path,
                train_loss=mean_training_loss(y, F, config.task),
                loss_reduction=float(stump.sse_reduction),
                relative_reduction=float(max(stump.sse_reduction - second, 0.0)),
                pool_size=pool.n_cols,
            )
        )

    return BoostModel(
        task=config.task,
        f0=f0,
        eta=config.eta,
        config=config,
        anchor=prep.anchor,
        attr_index=prep.attr_index,
        alphabet=view.label_alphabet,
        allowed_labels=prep.allowed_labels,
        node_attr_dim=view.node_attr_dim,
        edge_attr_dim=view.edge_attr_dim,
        stages=tuple(stages),
        initial_loss=initial_loss,
        log=tuple(records),
        candidate_paths=tuple(pool.paths),
    )


def train(ds: Dataset, config: BoostConfig, anchor: AnchorConfig | None = None) -> BoostModel:
    """Fit a model on a whole dataset."""
    prep = prepare(ds, anchor or AnchorConfig())
    return train_prepared(prep, np.arange(ds.graph_count), config)


@dataclass(frozen=True)
class ScoreRecord:
    logit: float
    probability: float
    label: int


def _encode_graph(model: BoostModel, graph: Graph) -> Graph:
    """Recode a raw graph's labels to the model's matching alphabet."""
    if model.attr_index == 0:
        return graph
    j = model.attr_index - 1
    if graph.node_attr_dim <= j:
        raise ValueError(
            f"graph has {graph.node_attr_dim} attribute columns, model matches on column {j}"
        )
    from .graphs import _readonly
    from .tudata import format_value

    code_of = {name: i for i, name in enumerate(model.alphabet)}
    # values outside the training alphabet get a sentinel that matches no path
    codes = np.array(
        [code_of.get(format_value(v), -1) for v in graph.node_attrs[:, j]],
        dtype=np.int64,
    )
    return Graph(
        adjacency=graph.adjacency,
        node_labels=_readonly(codes),
        node_attrs=graph.node_attrs,
        edges=graph.edges,
        edge_attrs=graph.edge_attrs,
    )


def _stage_logit(model: BoostModel, rows: dict[LabelledPath, np.ndarray]) -> float:
    contributions = [st.tree.predict_row(rows[st.path]) for st in model.stages]
    return model.f0 + model.eta * math.fsum(contributions)


def predict(model: BoostModel, graph: Graph) -> ScoreRecord | float:
    """Score one graph.

    Returns a :class:`ScoreRecord` for classification (class 1 iff the
    probability strictly exceeds 0.5) and a float for regression.  Stage
    contributions are combined with exact summation, so regrouping them by
    path cannot change the result.
    """
    from .anchors import anchor_nodes
    from .features import extended_feature_row

    g = _encode_graph(model, graph)
    anchors = anchor_nodes(g, model.allowed_labels)
    rows: dict[LabelledPath, np.ndarray] = {}
    for st in model.stages:
        if st.path not in rows:
            rows[st.path] = extended_feature_row(
                g, anchors, st.path, restricted=model.config.restricted
            )
    f = _stage_logit(model, rows)
    if model.task == "regression":
        return f
    p = float(sigmoid(f))
    return ScoreRecord(logit=f, probability=p, label=int(p > 0.5))


def predict_prepared(model: BoostModel, prep: PreparedData, idx: np.ndarray) -> np.ndarray:
    """Link-scale predictions for rows of a prepared dataset.

    Uses the shared feature cache and the same exact summation as
    :func:`predict`.
    """
    idx = np.asarray(idx, dtype=np.int64)
    n = idx.shape[0]
    if not model.stages:
        return np.full(n, model.f0)
    contrib = np.empty((len(model.stages), n))
    phi_of: dict[tuple[LabelledPath, bool], np.ndarray] = {}
    for si, st in enumerate(model.stages):
        key = (st.path, model.config.restricted)
        if key not in phi_of:
            phi_of[key] = prep.cache.phi(st.path, restricted=model.config.restricted)[idx]
        contrib[si] = st.tree.predict(phi_of[key])
    return np.array(
        [model.f0 + model.eta * math.fsum(contrib[:, i]) for i in range(n)]
    )


@dataclass(frozen=True)
class ImportanceRow:
    path: LabelledPath
    path_name: str
    absolute: float
    relative: float


def importance(model: BoostModel) -> list[ImportanceRow]:
    """Per-path variable importance, both variants rescaled to [0, 100].

    "absolute" sums each stage's squared-error reduction; "relative" sums the
    margin over the runner-up column recorded when the stage was selected.
    The strongest path scores exactly 100; rows sort by absolute importance,
    ties by path.
    """
    abs_sum: dict[LabelledPath, float] = {}
    rel_sum: dict[LabelledPath, float] = {}
    for st in model.stages:
        abs_sum[st.path] = abs_sum.get(st.path, 0.0) + st.loss_reduction
        rel_sum[st.path] = rel_sum.get(st.path, 0.0) + st.relative_reduction

    def rescale(sums: dict[LabelledPath, float]) -> dict[LabelledPath, float]:
        top = max(sums.values(), default=0.0)
        if top <= 0.0:
            if sums:
                log.warning("all reductions are zero; importance left at zero")
            return {p: 0.0 for p in sums}
        # divide first: v / top is exactly 1.0 at the maximum, so the top
        # score is exactly 100 regardless of the sums' rounding
        return {p: 100.0 * (v / top) for p, v in sums.items()}

    abs_scaled = rescale(abs_sum)
    rel_scaled = rescale(rel_sum)
    rows = [
        ImportanceRow(p, model.path_name(p), abs_scaled[p], rel_scaled[p])
        for p in abs_sum
    ]
    rows.sort(key=lambda row: (-row.absolute, row.path))
    return rows


def _anchor_to_dict(anchor: AnchorConfig) -> dict:
    return {
        "mode": anchor.mode,
        "user_labels": sorted(anchor.user_labels) if anchor.user_labels else None,
        "categorical_threshold": anchor.categorical_threshold,
        "rare_top_k": anchor.rare_top_k,
    }


def save_model(model: BoostModel, path: str | os.PathLike) -> None:
    """Serialise a model to JSON."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "task": model.task,
        "f0": model.f0,
        "eta": model.eta,
        "config": {
            "task": model.config.task,
            "m_stop": model.config.m_stop,
            "eta": model.config.eta,
            "max_depth": model.config.max_depth,
            "min_leaf": model.config.min_leaf,
            "attribute_mode": model.config.attribute_mode,
            "max_path_length": model.config.max_path_length,
            "seed": model.config.seed,
        },
        "anchor": _anchor_to_dict(model.anchor),
        "attr_index": model.attr_index,
        "alphabet": list(model.alphabet),
        "allowed_labels": sorted(model.allowed_labels) if model.allowed_labels is not None else None,
        "node_attr_dim": model.node_attr_dim,
        "edge_attr_dim": model.edge_attr_dim,
        "initial_loss": model.initial_loss,
        "stages": [
            {
                "path": list(st.path),
                "path_name": model.path_name(st.path),
                "loss_reduction": st.loss_reduction,
                "relative_reduction": st.relative_reduction,
                "tree": st.tree.to_dict(),
            }
            for st in model.stages
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path: str | os.PathLike) -> BoostModel:
    """Load a model saved by :func:`save_model`; malformed files raise
    :class:`ModelError`."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file {path} is not valid JSON: {exc}") from exc
    try:
        if doc.get("format") != MODEL_FORMAT:
            raise ModelError(f"model file {path} has unknown format tag {doc.get('format')!r}")
        if doc.get("version") != MODEL_VERSION:
            raise ModelError(f"model file {path} has unsupported version {doc.get('version')!r}")
        config = BoostConfig(**doc["config"])
        a = doc["anchor"]
        anchor = AnchorConfig(
            mode=a["mode"],
            user_labels=frozenset(a["user_labels"]) if a["user_labels"] else None,
            categorical_threshold=a["categorical_threshold"],
            rare_top_k=a["rare_top_k"],
        )
        stages = tuple(
            Stage(
                path=tuple(int(x) for x in st["path"]),
                tree=RegressionTree.from_dict(st["tree"], config.max_depth, config.min_leaf),
                loss_reduction=float(st["loss_reduction"]),
                relative_reduction=float(st["relative_reduction"]),
            )
            for st in doc["stages"]
        )
        allowed = doc["allowed_labels"]
        return BoostModel(
            task=str(doc["task"]),
            f0=float(doc["f0"]),
            eta=float(doc["eta"]),
            config=config,
            anchor=anchor,
            attr_index=int(doc["attr_index"]),
            alphabet=tuple(doc["alphabet"]),
            allowed_labels=frozenset(allowed) if allowed is not None else None,
            node_attr_dim=int(doc["node_attr_dim"]),
            edge_attr_dim=int(doc["edge_attr_dim"]),
            stages=stages,
            initial_loss=float(doc.get("initial_loss", 0.0)),
        )
    except ModelError:
        raise
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ModelError(f"model file {path} is malformed: {exc}") from exc
