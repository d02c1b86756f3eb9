"""Greedy binary decision trees used to propose continuous cut-offs.

Trees are grown without pruning or depth caps; the only stop criteria
are a leaf-size floor and zero split gain.  Split quality is
information gain (base-2 entropy) for classification targets and
variance reduction (population variance, sample-weighted children) for
regression targets.  Candidate thresholds are midpoints between
consecutive distinct feature values within the node, a row goes right
when its value is strictly greater than the threshold, and both
children must keep strictly more than min_leaf rows.  Ties are broken
toward the lowest feature index, then the smallest threshold, so
fitting is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import CATEGORICAL, CONTINUOUS, Dataset, format_number

CLASSIFICATION = "classification"
REGRESSION = "regression"


class TreeError(ValueError):
    """Raised for invalid targets or feature sets."""


@dataclass(frozen=True)
class SplitRule:
    """Send a row right iff row[column] > threshold."""

    column: str
    threshold: float


@dataclass
class TreeNode:
    n_samples: int
    prediction: float
    split: SplitRule | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None


@dataclass
class DecisionTree:
    kind: str
    target: str
    features: list[str]
    min_leaf: int
    root: TreeNode

    def internal_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.split is not None:
                yield node
                stack.append(node.right)
                stack.append(node.left)

    def dump(self) -> str:
        lines: list[str] = [f"{self.kind} tree for {self.target} (min_leaf={self.min_leaf})"]

        def walk(node: TreeNode, depth: int) -> None:
            pad = "  " * depth
            if node.is_leaf:
                lines.append(f"{pad}leaf value={format_number(node.prediction)} [n={node.n_samples}]")
            else:
                lines.append(
                    f"{pad}{node.split.column} > {format_number(node.split.threshold)} [n={node.n_samples}]"
                )
                walk(node.left, depth + 1)
                walk(node.right, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines)


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Base-2 entropy per row of a class-count matrix; 0 log 0 is 0."""
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals
        terms = np.where(counts > 0, p * np.log2(p), 0.0)
    return -terms.sum(axis=1)


def _classification_best_split(
    X: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int
) -> tuple[float, int, float] | None:
    """Best (gain, feature position, threshold) at this node, or None."""
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    h_parent = float(_entropy_rows(parent_counts[None, :])[0])
    best: tuple[float, int, float] | None = None
    for f in range(X.shape[1]):
        v = X[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        ys = y[order]
        change = np.nonzero(vs[1:] > vs[:-1])[0] + 1  # left sizes at distinct-value boundaries
        if len(change) == 0:
            continue
        valid = change[(change > min_leaf) & (n - change > min_leaf)]
        if len(valid) == 0:
            continue
        onehot = np.zeros((n, n_classes), dtype=np.float64)
        onehot[np.arange(n), ys] = 1.0
        cum = np.cumsum(onehot, axis=0)
        left_counts = cum[valid - 1]
        right_counts = parent_counts[None, :] - left_counts
        h_left = _entropy_rows(left_counts)
        h_right = _entropy_rows(right_counts)
        gains = h_parent - (valid / n) * h_left - ((n - valid) / n) * h_right
        pos = int(np.argmax(gains))  # first maximum: smallest threshold wins ties
        gain = float(gains[pos])
        b = int(valid[pos])
        tau = (vs[b - 1] + vs[b]) / 2.0
        if best is None or gain > best[0]:
            best = (gain, f, tau)
    return best


def _regression_best_split(
    X: np.ndarray, y: np.ndarray, min_leaf: int
) -> tuple[float, int, float] | None:
    n = len(y)
    centered = y - y.mean()  # centering keeps the prefix sums well conditioned
    var_parent = float(np.mean(centered**2) - np.mean(centered) ** 2)
    best: tuple[float, int, float] | None = None
    for f in range(X.shape[1]):
        v = X[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        cs = centered[order]
        change = np.nonzero(vs[1:] > vs[:-1])[0] + 1
        if len(change) == 0:
            continue
        valid = change[(change > min_leaf) & (n - change > min_leaf)]
        if len(valid) == 0:
            continue
        s1 = np.cumsum(cs)
        s2 = np.cumsum(cs**2)
        t1, t2 = s1[-1], s2[-1]
        nl = valid.astype(np.float64)
        nr = n - nl
        l1, l2 = s1[valid - 1], s2[valid - 1]
        var_left = l2 / nl - (l1 / nl) ** 2
        var_right = (t2 - l2) / nr - ((t1 - l1) / nr) ** 2
        gains = var_parent - (nl * var_left + nr * var_right) / n
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        b = int(valid[pos])
        tau = (vs[b - 1] + vs[b]) / 2.0
        if best is None or gain > best[0]:
            best = (gain, f, tau)
    return best


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    features: list[str],
    kind: str,
    n_classes: int,
    min_leaf: int,
) -> TreeNode:
    n = len(idx)
    yn = y[idx]
    if kind == CLASSIFICATION:
        prediction = float(np.bincount(yn, minlength=n_classes).argmax())
    else:
        prediction = float(yn.mean())
    node = TreeNode(n_samples=n, prediction=prediction)
    if bool(np.all(yn == yn[0])) or n < 2 * (min_leaf + 1):
        return node
    Xn = X[idx]
    if kind == CLASSIFICATION:
        found = _classification_best_split(Xn, yn, n_classes, min_leaf)
    else:
        found = _regression_best_split(Xn, yn, min_leaf)
    if found is None or not found[0] > 0.0:
        return node
    _, f, tau = found
    right_mask = Xn[:, f] > tau
    node.split = SplitRule(column=features[f], threshold=float(tau))
    node.left = _grow(X, y, idx[~right_mask], features, kind, n_classes, min_leaf)
    node.right = _grow(X, y, idx[right_mask], features, kind, n_classes, min_leaf)
    return node


def _fit(dataset: Dataset, target: str, features: list[str], kind: str, min_leaf: int) -> DecisionTree:
    y = dataset.column(target)
    n_classes = int(y.max()) + 1 if kind == CLASSIFICATION else 0
    X = np.column_stack([dataset.column(f) for f in features])
    idx = np.arange(dataset.row_count, dtype=np.int64)
    root = _grow(X, y, idx, features, kind, n_classes, min_leaf)
    return DecisionTree(kind=kind, target=target, features=list(features), min_leaf=min_leaf, root=root)


def fit_classification_tree(dataset: Dataset, target: str, min_leaf: int) -> DecisionTree:
    """Grow a tree predicting a categorical column from all continuous columns."""
    if dataset.schema.kind(target) != CATEGORICAL:
        raise TreeError(f"classification target {target!r} is not categorical")
    features = dataset.schema.continuous_names
    if not features:
        raise TreeError(f"classification target {target!r}: no continuous columns to split on")
    return _fit(dataset, target, features, CLASSIFICATION, min_leaf)


def fit_regression_tree(dataset: Dataset, target: str, min_leaf: int) -> DecisionTree | None:
    """Grow a tree predicting a continuous column from the other continuous columns.

    Returns None when no other continuous column exists to split on.
    """
    if dataset.schema.kind(target) != CONTINUOUS:
        raise TreeError(f"regression target {target!r} is not continuous")
    features = [c for c in dataset.schema.continuous_names if c != target]
    if not features:
        return None
    return _fit(dataset, target, features, REGRESSION, min_leaf)


CutoffTable = dict[str, list[float]]


def extract_cutoffs(trees) -> CutoffTable:
    """Collect every internal-node threshold, deduplicated and sorted per column."""
    raw: dict[str, set[float]] = {}
    for tree in trees:
        if tree is None:
            continue
        for node in tree.internal_nodes():
            raw.setdefault(node.split.column, set()).add(float(node.split.threshold))
    return {column: sorted(values) for column, values in sorted(raw.items())}
