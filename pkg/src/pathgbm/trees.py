"""Least-squares stumps and depth-bounded regression trees.

Split quality is the drop in sum of squared errors around the mean.  Split
thresholds sit halfway between consecutive distinct sorted values and route
``value <= threshold`` to the left.  Ties resolve to the lower feature index,
then the lower threshold, so refitting on identical data reproduces the same
structure exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Stump:
    """One least-squares split; ``feature == -1`` marks the degenerate case
    where no column admits a split and both sides fall back to the mean."""

    feature: int
    threshold: float
    left_value: float
    right_value: float
    sse_reduction: float


def _column_split(x_sorted: np.ndarray, r_cumsum: np.ndarray, min_leaf: int = 1):
    """Best split of one presorted column.

    Returns (reduction, position) where position k means the first k sorted
    rows go left, or None when no boundary separates distinct values with
    both sides at least ``min_leaf``.  First maximum wins, so reduction ties
    take the lowest threshold.
    """
    n = r_cumsum.shape[0]
    if n < 2:
        return None
    total = r_cumsum[-1]
    valid = x_sorted[1:] != x_sorted[:-1]
    if min_leaf > 1:
        k = np.arange(1, n)
        valid = valid & (k >= min_leaf) & (n - k >= min_leaf)
    if not valid.any():
        return None
    left = r_cumsum[:-1]
    k = np.arange(1, n, dtype=np.float64)
    red = left * left / k + (total - left) ** 2 / (n - k) - total * total / n
    red[~valid] = -np.inf
    i = int(np.argmax(red))
    return float(red[i]), i + 1


def fit_stump(X: np.ndarray, r: np.ndarray) -> Stump:
    """Exhaustive least-squares stump over all columns of ``X``.

    Ties across columns resolve to the lower feature index.  A matrix with no
    splittable column yields the degenerate stump with zero reduction.
    """
    X = np.asarray(X)
    r = np.asarray(r, dtype=np.float64)
    n, c = X.shape
    best = None
    for j in range(c):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        found = _column_split(xs, np.cumsum(r[order]))
        if found is None:
            continue
        red, pos = found
        if best is None or red > best[0]:
            thr = (float(xs[pos - 1]) + float(xs[pos])) / 2.0
            left = r[order[:pos]]
            right = r[order[pos:]]
            best = (red, j, thr, float(left.mean()), float(right.mean()))
    if best is None:
        mean = float(r.mean()) if n else 0.0
        return Stump(-1, 0.0, mean, mean, 0.0)
    red, j, thr, lv, rv = best
    return Stump(j, thr, lv, rv, max(red, 0.0))


class StumpScanner:
    """Incremental stump search over an append-only column set.

    Columns are presorted once when added; each scan gathers the residuals in
    every column's order, builds cumulative sums and evaluates all split
    boundaries at once.  Results match :func:`fit_stump` exactly, including
    tie-breaking.
    """

    def __init__(self, n_rows: int):
        self.n_rows = n_rows
        self._order: list[np.ndarray] = []
        self._sorted_values: list[np.ndarray] = []
        self._valid: list[np.ndarray] = []

    @property
    def n_cols(self) -> int:
        return len(self._order)

    def add_column(self, values: np.ndarray) -> None:
        values = np.asarray(values)
        if values.shape != (self.n_rows,):
            raise ValueError(f"column shape {values.shape} != ({self.n_rows},)")
        order = np.argsort(values, kind="stable").astype(np.int32)
        xs = values[order]
        self._order.append(order)
        self._sorted_values.append(xs.astype(np.float64))
        self._valid.append(xs[1:] != xs[:-1])

    def scan(self, r: np.ndarray):
        """Best stump over all columns; returns (Stump, second_best_reduction).

        ``second_best_reduction`` is the strongest per-column reduction among
        the non-winning columns, 0.0 when no other column splits.
        """
        n = self.n_rows
        c = self.n_cols
        r = np.asarray(r, dtype=np.float64)
        if c == 0 or n < 2:
            mean = float(r.mean()) if n else 0.0
            return Stump(-1, 0.0, mean, mean, 0.0), 0.0
        order = np.stack(self._order, axis=1)
        valid = np.stack(self._valid, axis=1)
        cs = np.cumsum(r[order], axis=0)
        # per-column totals keep the arithmetic identical to fit_stump, so
        # tie-breaking agrees to the last ulp
        total = cs[-1]
        k = np.arange(1, n, dtype=np.float64)[:, None]
        left = cs[:-1]
        red = left * left / k + (total - left) ** 2 / (n - k) - total * total / n
        red[~valid] = -np.inf
        pos = np.argmax(red, axis=0)
        col_best = red[pos, np.arange(c)]
        j = int(np.argmax(col_best))
        if not np.isfinite(col_best[j]):
            mean = float(r.mean())
            return Stump(-1, 0.0, mean, mean, 0.0), 0.0
        others = np.delete(col_best, j)
        second = float(others.max()) if others.size and np.isfinite(others.max()) else 0.0
        i = int(pos[j])
        xs = self._sorted_values[j]
        thr = (xs[i] + xs[i + 1]) / 2.0
        lsum = cs[i, j]
        lv = lsum / (i + 1)
        rv = (total[j] - lsum) / (n - i - 1)
        return Stump(j, float(thr), float(lv), float(rv), max(float(col_best[j]), 0.0)), max(second, 0.0)


@dataclass(frozen=True)
class Leaf:
    value: float
    count: int = 0

    def to_dict(self) -> dict:
        return {"value": self.value}


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Split | Leaf"
    right: "Split | Leaf"

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def _node_from_dict(d: dict) -> Split | Leaf:
    if "value" in d:
        return Leaf(float(d["value"]))
    return Split(
        int(d["feature"]),
        float(d["threshold"]),
        _node_from_dict(d["left"]),
        _node_from_dict(d["right"]),
    )


@dataclass(frozen=True)
class RegressionTree:
    """Binary regression tree routing ``value <= threshold`` to the left."""

    root: Split | Leaf
    max_depth: int
    min_leaf: int

    def predict_row(self, row: np.ndarray) -> float:
        node = self.root
        while isinstance(node, Split):
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.value

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.zeros(X.shape[0])

        def route(node, idx):
            if isinstance(node, Leaf):
                out[idx] = node.value
                return
            go_left = X[idx, node.feature] <= node.threshold
            route(node.left, idx[go_left])
            route(node.right, idx[~go_left])

        route(self.root, np.arange(X.shape[0]))
        return out

    def leaves(self) -> list[Leaf]:
        found = []

        def walk(node):
            if isinstance(node, Leaf):
                found.append(node)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return found

    def depth(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def to_dict(self) -> dict:
        return self.root.to_dict()

    @classmethod
    def from_dict(cls, d: dict, max_depth: int = 0, min_leaf: int = 0) -> "RegressionTree":
        return cls(_node_from_dict(d), max_depth, min_leaf)


def fit_tree(X: np.ndarray, r: np.ndarray, max_depth: int = 3, min_leaf: int = 5) -> RegressionTree:
    """Greedy depth-bounded least-squares tree on (X, r).

    Recursion stops at ``max_depth``, when both children cannot reach
    ``min_leaf`` rows, or when no split reduces the squared error.  Leaf
    values are residual means.  Tie-breaking matches :func:`fit_stump`.
    """
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    n, d = X.shape
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if n == 0:
        raise ValueError("cannot fit a tree on zero rows")
    full_order = [np.argsort(X[:, j], kind="stable") for j in range(d)]
    in_node = np.zeros(n, dtype=bool)

    def grow(rows: np.ndarray, depth: int) -> Split | Leaf:
        rv = r[rows]
        # pure nodes stop; zero-gain splits elsewhere stay allowed so that
        # interactions hidden behind a flat first split remain reachable
        if depth >= max_depth or rows.shape[0] < 2 * min_leaf or np.ptp(rv) == 0.0:
            return Leaf(float(rv.mean()), rows.shape[0])
        in_node[rows] = True
        best = None
        for j in range(d):
            order = full_order[j]
            sel = order[in_node[order]]
            xs = X[sel, j]
            found = _column_split(xs, np.cumsum(r[sel]), min_leaf)
            if found is None:
                continue
            red, pos = found
            if best is None or red > best[0]:
                best = (red, j, (float(xs[pos - 1]) + float(xs[pos])) / 2.0, sel, pos)
        in_node[rows] = False
        if best is None:
            return Leaf(float(rv.mean()), rows.shape[0])
        _, j, thr, sel, pos = best
        return Split(j, thr, grow(sel[:pos], depth + 1), grow(sel[pos:], depth + 1))

    return RegressionTree(grow(np.arange(n), 0), max_depth, min_leaf)
