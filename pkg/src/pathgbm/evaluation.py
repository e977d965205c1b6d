"""Repeated stratified cross-validation, metrics and learning curves.

Every random draw derives from ``np.random.default_rng`` seeded with a
documented tuple: fold layouts use ``(seed, repetition)``, learning-curve
subsamples use ``(seed, repetition, fold, fraction_token)`` where the token
is ``round(fraction * 10**9)``.  Identical seeds therefore reproduce
identical splits no matter how many worker processes run the folds.
"""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .anchors import AnchorConfig, anchor_sets, rare_label_filter, resolve_allowed_labels, select_anchor_attribute, with_anchor_attribute
from .boosting import (
    BoostConfig,
    ConfigError,
    PreparedData,
    predict_prepared,
    sigmoid,
    train_prepared,
)
from .features import FeatureCache
from .graphs import Dataset

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- metrics


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Share of exact matches, in percent."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("accuracy needs two equal-length non-empty vectors")
    return float(100.0 * np.mean(y_true == y_pred))


def f1_macro(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Unweighted mean of the per-class F1 scores of a 0/1 task, in percent.

    A class with zero precision and recall contributes an F1 of 0.
    """
    y_true = np.asarray(y_true).astype(np.int64)
    y_pred = np.asarray(y_pred).astype(np.int64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("f1_macro needs two equal-length non-empty vectors")
    scores = []
    for c in (0, 1):
        tp = int(np.sum((y_true == c) & (y_pred == c)))
        fp = int(np.sum((y_true != c) & (y_pred == c)))
        fn = int(np.sum((y_true == c) & (y_pred != c)))
        denom = 2 * tp + fp + fn
        if denom == 0:
            log.debug("class %d has no true or predicted members; F1 set to 0", c)
            scores.append(0.0)
        else:
            scores.append(2.0 * tp / denom)
    return float(100.0 * np.mean(scores))


def regression_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[float, float]:
    """(mean absolute error, coefficient of determination).

    R squared is NaN with a warning when the targets have zero variance.
    """
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("regression metrics need two equal-length non-empty vectors")
    mae = float(np.mean(np.abs(y_true - y_pred)))
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        log.warning("targets have zero variance; R squared is undefined")
        return mae, float("nan")
    sse = float(np.sum((y_true - y_pred) ** 2))
    return mae, 1.0 - sse / sst


# ---------------------------------------------------------------- folds


@dataclass(frozen=True)
class CVPlan:
    """Shape of the cross-validation: k folds repeated several times."""

    folds: int = 10
    repetitions: int = 10
    seed: int = 0
    stratified: bool = True

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")


def make_folds(
    n: int,
    folds: int,
    rng: np.random.Generator,
    labels: np.ndarray | None = None,
) -> np.ndarray:
    """Assign each of ``n`` instances to one of ``folds`` folds.

    Overall fold sizes differ by at most one.  With ``labels`` the assignment
    is stratified, keeping each class's per-fold counts within one of each
    other; a class smaller than the fold count forces a plain shuffle with a
    warning.
    """
    if n < folds:
        raise ConfigError(f"cannot split {n} instances into {folds} folds")
    if labels is not None:
        counts = np.unique(np.asarray(labels), return_counts=True)[1]
        if counts.min() < folds:
            log.warning(
                "smallest class has %d members, fewer than %d folds; "
                "falling back to an unstratified split",
                int(counts.min()),
                folds,
            )
            labels = None
    assignment = np.empty(n, dtype=np.int64)
    if labels is None:
        order = rng.permutation(n)
        assignment[order] = np.arange(n) % folds
        return assignment
    labels = np.asarray(labels)
    # one global round robin walked class by class: per-class counts and
    # overall fold sizes both stay within one
    offset = 0
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        members = members[rng.permutation(members.shape[0])]
        assignment[members] = (offset + np.arange(members.shape[0])) % folds
        offset = (offset + members.shape[0]) % folds
    return assignment


def fold_assignments(n: int, plan: CVPlan, labels: np.ndarray | None) -> list[np.ndarray]:
    """One assignment per repetition, each from rng seeded (seed, rep)."""
    out = []
    for rep in range(plan.repetitions):
        rng = np.random.default_rng((plan.seed, rep))
        out.append(make_folds(n, plan.folds, rng, labels if plan.stratified else None))
    return out


def layout_hash(assignment: np.ndarray) -> str:
    return hashlib.sha256(assignment.astype(np.int64).tobytes()).hexdigest()[:12]


# ---------------------------------------------------------------- grid


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grid searched on an inner validation split.

    Combinations are visited in declared order (m_stop outermost, max_depth
    innermost); score ties keep the earliest combination.
    """

    m_stop: tuple[int, ...] = (100, 300, 600)
    eta: tuple[float, ...] = (0.05, 0.1, 0.3)
    max_depth: tuple[int, ...] = (2, 3)
    validation_fraction: float = 0.1

    def __post_init__(self) -> None:
        if not (self.m_stop and self.eta and self.max_depth):
            raise ConfigError("grid axes must be non-empty")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigError("validation fraction must lie in (0, 1)")

    def combos(self) -> list[tuple[int, float, int]]:
        return [
            (m, e, d)
            for m in self.m_stop
            for e in self.eta
            for d in self.max_depth
        ]


def _inner_split(
    y: np.ndarray, fraction: float, rng: np.random.Generator, stratified: bool
) -> tuple[np.ndarray, np.ndarray]:
    """Positions of (fit, validation) rows for the grid's single inner split.

    Stratified draws take a proportional share of each class but always leave
    at least one member behind, so the fit part keeps every class.
    """
    n = y.shape[0]
    if stratified:
        val: list[int] = []
        for c in np.unique(y):
            members = np.flatnonzero(y == c)
            members = members[rng.permutation(members.shape[0])]
            take = min(members.shape[0] - 1, max(1, int(round(fraction * members.shape[0]))))
            val.extend(members[:take].tolist())
    else:
        take = min(n - 1, max(1, int(round(fraction * n))))
        val = rng.permutation(n)[:take].tolist()
    val_idx = np.array(sorted(val), dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    mask[val_idx] = False
    return np.flatnonzero(mask), val_idx


def _tune(
    prep: PreparedData,
    train_idx: np.ndarray,
    base: BoostConfig,
    grid: GridSpec,
    rng: np.random.Generator,
) -> BoostConfig:
    """Pick the grid combination that scores best on the inner split."""
    y = prep.ds.targets[train_idx]
    classification = base.task == "classification"
    fit_pos, val_pos = _inner_split(y, grid.validation_fraction, rng, classification)
    fit_idx = train_idx[fit_pos]
    val_idx = train_idx[val_pos]
    best: tuple[float, BoostConfig] | None = None
    for m, e, d in grid.combos():
        cfg = BoostConfig(
            task=base.task,
            m_stop=m,
            eta=e,
            max_depth=d,
            min_leaf=base.min_leaf,
            attribute_mode=base.attribute_mode,
            max_path_length=base.max_path_length,
            seed=base.seed,
        )
        model = train_prepared(prep, fit_idx, cfg)
        logits = predict_prepared(model, prep, val_idx)
        y_val = prep.ds.targets[val_idx]
        if classification:
            score = accuracy(y_val.astype(int), (sigmoid(logits) > 0.5).astype(int))
        else:
            score = -regression_metrics(y_val, logits)[0]
        if best is None or score > best[0]:
            best = (score, cfg)
    return best[1]


# ---------------------------------------------------------------- folds runs


@dataclass(frozen=True)
class FoldResult:
    repetition: int
    fold: int
    fraction: float
    n_train: int
    n_test: int
    metrics: dict[str, float]
    config: BoostConfig
    stages: int
    seconds: float = field(compare=False, default=0.0)
    predictions: tuple | None = None


@dataclass(frozen=True)
class CVReport:
    """Aggregated cross-validation outcome.

    ``rep_values`` holds each repetition's fold-mean per metric; ``mean`` and
    ``std`` summarise across repetitions (sample standard deviation).
    ``seconds`` is wall-clock and deliberately left out of serialisations.
    """

    dataset: str
    task: str
    plan: CVPlan
    metric_names: tuple[str, ...]
    folds: tuple[FoldResult, ...]
    rep_values: dict[str, tuple[float, ...]]
    mean: dict[str, float]
    std: dict[str, float]
    layout_hashes: tuple[str, ...]
    grid_used: bool
    seconds: float = field(compare=False, default=0.0)


class _PrepRegistry:
    """Per-process memo of prepared datasets, keyed by anchor resolution.

    Holding the views and caches here lets every fold, repetition and grid
    point that resolves to the same (attribute, allowed-labels) pair share
    one feature cache.
    """

    def __init__(self) -> None:
        self._ds: Dataset | None = None
        self._views: dict[int, Dataset] = {}
        self._preps: dict[tuple, PreparedData] = {}

    def get(self, ds: Dataset, anchor: AnchorConfig, attr: int, allowed: frozenset[int] | None) -> PreparedData:
        if self._ds is not ds:
            self._ds = ds
            self._views = {}
            self._preps = {}
        key = (attr, allowed)
        if key not in self._preps:
            if attr not in self._views:
                self._views[attr] = with_anchor_attribute(ds, attr)
            view = self._views[attr]
            sets = anchor_sets(view, allowed)
            cache = FeatureCache(
                view.graphs,
                sets,
                n_labels=len(view.label_alphabet),
                node_attr_dim=view.node_attr_dim,
                edge_attr_dim=view.edge_attr_dim,
            )
            self._preps[key] = PreparedData(view, anchor, attr, allowed, sets, cache)
        return self._preps[key]


def _resolve_fold_prep(
    registry: _PrepRegistry, ds: Dataset, anchor: AnchorConfig, train_idx: np.ndarray
) -> PreparedData:
    """Anchor resolution for one fold, using training rows only."""
    if anchor.mode == "user":
        attr = 0
        allowed = resolve_allowed_labels(ds, anchor)
    else:
        attr = select_anchor_attribute(ds.subset(train_idx), anchor)
        view = registry.get(ds, anchor, attr, None).ds
        if anchor.rare_top_k is not None:
            allowed = rare_label_filter(view.subset(train_idx), anchor.rare_top_k)
        else:
            allowed = None
    return registry.get(ds, anchor, attr, allowed)


def _subsample(
    train_idx: np.ndarray,
    y: np.ndarray,
    fraction: float,
    rng: np.random.Generator,
    stratified: bool,
) -> np.ndarray:
    """Rounded stratified subsample of the training rows, sorted ascending."""
    if fraction >= 1.0:
        return train_idx
    keep: list[int] = []
    if stratified:
        for c in np.unique(y):
            members = np.flatnonzero(y == c)
            members = members[rng.permutation(members.shape[0])]
            keep.extend(members[: int(round(fraction * members.shape[0]))].tolist())
    else:
        take = max(1, int(round(fraction * y.shape[0])))
        keep = rng.permutation(y.shape[0])[:take].tolist()
    return train_idx[np.array(sorted(keep), dtype=np.int64)]


def _run_fold(
    registry: _PrepRegistry,
    ds: Dataset,
    config: BoostConfig,
    anchor: AnchorConfig,
    plan: CVPlan,
    grid: GridSpec | None,
    assignment: np.ndarray,
    rep: int,
    fold: int,
    fraction: float,
    collect: bool,
) -> FoldResult:
    try:
        started = time.perf_counter()
        test_idx = np.flatnonzero(assignment == fold)
        train_idx = np.flatnonzero(assignment != fold)
        classification = config.task == "classification"
        if fraction < 1.0:
            rng = np.random.default_rng(
                (plan.seed, rep, fold, int(round(fraction * 10**9)))
            )
            train_idx = _subsample(
                train_idx, ds.targets[train_idx], fraction, rng, classification
            )
        prep = _resolve_fold_prep(registry, ds, anchor, train_idx)
        cfg = config
        if grid is not None:
            cfg = _tune(
                prep,
                train_idx,
                config,
                grid,
                np.random.default_rng((plan.seed, rep, fold, 1)),
            )
        model = train_prepared(prep, train_idx, cfg)
        logits = predict_prepared(model, prep, test_idx)
        y_test = ds.targets[test_idx]
        if classification:
            labels = (sigmoid(logits) > 0.5).astype(int)
            metrics = {
                "accuracy": accuracy(y_test.astype(int), labels),
                "f1_macro": f1_macro(y_test.astype(int), labels),
            }
            preds = (
                tuple(
                    (int(i), float(f), float(sigmoid(f)), int(l), int(t))
                    for i, f, l, t in zip(test_idx, logits, labels, y_test)
                )
                if collect
                else None
            )
        else:
            mae, r2 = regression_metrics(y_test, logits)
            metrics = {"mae": mae, "r2": r2}
            preds = (
                tuple(
                    (int(i), float(f), float(t))
                    for i, f, t in zip(test_idx, logits, y_test)
                )
                if collect
                else None
            )
        return FoldResult(
            repetition=rep,
            fold=fold,
            fraction=fraction,
            n_train=int(train_idx.shape[0]),
            n_test=int(test_idx.shape[0]),
            metrics=metrics,
            config=cfg,
            stages=len(model.stages),
            seconds=time.perf_counter() - started,
            predictions=preds,
        )
    except Exception as exc:
        raise type(exc)(f"repetition {rep}, fold {fold}: {exc}") from exc


_WORKER_CTX: dict = {}


def _init_worker(ds, config, anchor, plan, grid, assignments, collect) -> None:
    _WORKER_CTX["args"] = (ds, config, anchor, plan, grid, assignments, collect)
    _WORKER_CTX["registry"] = _PrepRegistry()


def _worker_job(job: tuple[int, int, float]) -> FoldResult:
    rep, fold, fraction = job
    ds, config, anchor, plan, grid, assignments, collect = _WORKER_CTX["args"]
    return _run_fold(
        _WORKER_CTX["registry"],
        ds,
        config,
        anchor,
        plan,
        grid,
        assignments[rep],
        rep,
        fold,
        fraction,
        collect,
    )


def _run_jobs(
    ds: Dataset,
    config: BoostConfig,
    anchor: AnchorConfig,
    plan: CVPlan,
    grid: GridSpec | None,
    assignments: list[np.ndarray],
    jobs: list[tuple[int, int, float]],
    threads: int,
    collect: bool,
) -> list[FoldResult]:
    if threads <= 1:
        registry = _PrepRegistry()
        return [
            _run_fold(
                registry, ds, config, anchor, plan, grid,
                assignments[rep], rep, fold, fraction, collect,
            )
            for rep, fold, fraction in jobs
        ]
    with ProcessPoolExecutor(
        max_workers=threads,
        initializer=_init_worker,
        initargs=(ds, config, anchor, plan, grid, assignments, collect),
    ) as pool:
        return list(pool.map(_worker_job, jobs))


def _aggregate(
    ds: Dataset,
    config: BoostConfig,
    plan: CVPlan,
    results: list[FoldResult],
    hashes: list[str],
    grid_used: bool,
    seconds: float,
) -> CVReport:
    names = tuple(results[0].metrics.keys())
    rep_values: dict[str, tuple[float, ...]] = {}
    for name in names:
        vals = []
        for rep in range(plan.repetitions):
            folds = [r.metrics[name] for r in results if r.repetition == rep]
            vals.append(float(np.mean(folds)))
        rep_values[name] = tuple(vals)
    mean = {name: float(np.mean(rep_values[name])) for name in names}
    std = {
        name: float(np.std(rep_values[name], ddof=1)) if plan.repetitions > 1 else 0.0
        for name in names
    }
    return CVReport(
        dataset=ds.name,
        task=config.task,
        plan=plan,
        metric_names=names,
        folds=tuple(sorted(results, key=lambda r: (r.repetition, r.fold))),
        rep_values=rep_values,
        mean=mean,
        std=std,
        layout_hashes=tuple(hashes),
        grid_used=grid_used,
        seconds=seconds,
    )


def run_cv(
    ds: Dataset,
    config: BoostConfig,
    anchor: AnchorConfig | None = None,
    plan: CVPlan | None = None,
    grid: GridSpec | None = None,
    threads: int = 1,
    collect_predictions: bool = False,
) -> CVReport:
    """Repeated k-fold cross-validation of one configuration.

    Anchor attributes are re-selected on every training split, so no test
    information leaks into the matching alphabet choice.
    """
    anchor = anchor or AnchorConfig()
    plan = plan or CVPlan()
    started = time.perf_counter()
    labels = ds.targets if config.task == "classification" else None
    assignments = fold_assignments(ds.graph_count, plan, labels)
    hashes = [layout_hash(a) for a in assignments]
    jobs = [
        (rep, fold, 1.0)
        for rep in range(plan.repetitions)
        for fold in range(plan.folds)
    ]
    results = _run_jobs(
        ds, config, anchor, plan, grid, assignments, jobs, threads, collect_predictions
    )
    return _aggregate(
        ds, config, plan, results, hashes, grid is not None,
        time.perf_counter() - started,
    )


@dataclass(frozen=True)
class LearningCurve:
    dataset: str
    task: str
    plan: CVPlan
    metric_names: tuple[str, ...]
    fractions: tuple[float, ...]
    skipped: tuple[float, ...]
    mean: dict[float, dict[str, float]]
    std: dict[float, dict[str, float]]
    folds: tuple[FoldResult, ...]
    seconds: float = field(compare=False, default=0.0)


def _fraction_loses_a_class(
    assignments: list[np.ndarray], targets: np.ndarray, fraction: float
) -> bool:
    classes = np.unique(targets)
    for assignment in assignments:
        for fold in np.unique(assignment):
            y_train = targets[assignment != fold]
            for c in classes:
                if int(round(fraction * int(np.sum(y_train == c)))) == 0:
                    return True
    return False


def learning_curve(
    ds: Dataset,
    fractions: list[float],
    config: BoostConfig,
    anchor: AnchorConfig | None = None,
    plan: CVPlan | None = None,
    grid: GridSpec | None = None,
    threads: int = 1,
) -> LearningCurve:
    """Cross-validated metrics at increasing training-set fractions.

    Fractions so small that a class would vanish from some training split are
    skipped with a warning.
    """
    anchor = anchor or AnchorConfig()
    plan = plan or CVPlan()
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ConfigError(f"fraction {f} outside (0, 1]")
    started = time.perf_counter()
    labels = ds.targets if config.task == "classification" else None
    assignments = fold_assignments(ds.graph_count, plan, labels)
    kept: list[float] = []
    skipped: list[float] = []
    for f in sorted(set(fractions)):
        if labels is not None and _fraction_loses_a_class(assignments, ds.targets, f):
            log.warning(
                "skipping fraction %s: a class would vanish from a training split", f
            )
            skipped.append(f)
        else:
            kept.append(f)
    jobs = [
        (rep, fold, f)
        for f in kept
        for rep in range(plan.repetitions)
        for fold in range(plan.folds)
    ]
    results = _run_jobs(ds, config, anchor, plan, grid, assignments, jobs, threads, False)
    names = tuple(results[0].metrics.keys()) if results else ()
    mean: dict[float, dict[str, float]] = {}
    std: dict[float, dict[str, float]] = {}
    for f in kept:
        rows = [r for r in results if r.fraction == f]
        mean[f] = {}
        std[f] = {}
        for name in names:
            reps = [
                float(np.mean([r.metrics[name] for r in rows if r.repetition == rep]))
                for rep in range(plan.repetitions)
            ]
            mean[f][name] = float(np.mean(reps))
            std[f][name] = float(np.std(reps, ddof=1)) if plan.repetitions > 1 else 0.0
    return LearningCurve(
        dataset=ds.name,
        task=config.task,
        plan=plan,
        metric_names=names,
        fractions=tuple(kept),
        skipped=tuple(skipped),
        mean=mean,
        std=std,
        folds=tuple(sorted(results, key=lambda r: (r.fraction, r.repetition, r.fold))),
        seconds=time.perf_counter() - started,
    )
