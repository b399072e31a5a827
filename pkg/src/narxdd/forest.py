"""Greedy regression trees with an exact leaf budget, plus forests of them.

Trees grow best-first: the leaf whose best split removes the most
sum-of-squared-error is split next, so the number of leaves is a precise
capacity knob. Tie gains are broken by a seeded random choice (and features
are scanned in a seeded random order), which is what makes members of a
forest differ once every tree interpolates the training data. Forests
average member predictions and never bootstrap.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .features import RegressorSet
from .seeding import derive_seed

__all__ = ["RegressionTree", "Forest", "fit_tree", "fit_forest", "predict"]


@dataclass(frozen=True)
class RegressionTree:
    """Binary regression tree stored as parallel node arrays.

    feature[i] is -1 at leaves; value[i] is the mean target of the rows
    routed to node i (the prediction, at leaves).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    leaf_count: int
    n_features: int

    def predict_one(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected a regressor of dimension {self.n_features}")
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.value[node])

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected rows of dimension {self.n_features}")
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if self.feature[node] < 0:
                out[idx] = self.value[node]
                continue
            mask = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[mask]))
            stack.append((self.right[node], idx[~mask]))
        return out


@dataclass(frozen=True)
class Forest:
    """Ensemble of regression trees predicting the mean of member outputs."""

    trees: tuple
    total_leaves: int

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def predict_one(self, x) -> float:
        preds = np.asarray([tree.predict_one(x) for tree in self.trees])
        # clamp into the member range: keeps the mean of identical member
        # predictions bit-exact (interpolating forests must reproduce the
        # training targets exactly) and the output inside the target range
        return float(min(max(preds.mean(), preds.min()), preds.max()))

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        preds = np.stack([tree.predict_rows(X) for tree in self.trees])
        return np.clip(preds.mean(axis=0), preds.min(axis=0), preds.max(axis=0))


def _best_split(X, y, rows, rng):
    """Best (feature, threshold) split of a leaf, or None if unsplittable.

    Thresholds sit at midpoints between consecutive distinct sorted values.
    Exact gain ties are collected across features (scanned in a seeded
    random order) and one candidate is drawn at random.
    """
    y_leaf = y[rows]
    if np.all(y_leaf == y_leaf[0]):
        return None  # pure
    total_y = y_leaf.sum()
    total_y2 = (y_leaf * y_leaf).sum()
    n = rows.size
    parent_sse = total_y2 - total_y * total_y / n

    best_gain = -np.inf
    ties = []
    for f in rng.permutation(X.shape[1]):
        v = X[rows, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        boundaries = np.nonzero(sv[:-1] < sv[1:])[0]
        if boundaries.size == 0:
            continue
        sy = y_leaf[order]
        cy = np.cumsum(sy)
        cy2 = np.cumsum(sy * sy)
        k = boundaries + 1  # rows on the left side
        left_sse = cy2[boundaries] - cy[boundaries] ** 2 / k
        right_sse = (total_y2 - cy2[boundaries]) - (total_y - cy[boundaries]) ** 2 / (n - k)
        gains = np.maximum(parent_sse - left_sse - right_sse, 0.0)
        thresholds = 0.5 * (sv[boundaries] + sv[boundaries + 1])
        valid = thresholds < sv[boundaries + 1]  # midpoint must separate
        for gain, thr in zip(gains[valid], thresholds[valid]):
            if gain > best_gain:
                best_gain = gain
                ties = [(int(f), float(thr))]
            elif gain == best_gain:
                ties.append((int(f), float(thr)))
    if not ties:
        return None  # every feature constant on this leaf
    feat, thr = ties[rng.integers(len(ties))]
    mask = X[rows, feat] <= thr
    return best_gain, feat, thr, rows[mask], rows[~mask]


def fit_tree(regs: RegressorSet, max_leaves: int, seed: int) -> RegressionTree:
    """Grow a tree best-first until the leaf budget or purity is reached."""
    if max_leaves < 1:
        raise ValueError("max_leaves must be >= 1")
    X, y = regs.X, regs.targets
    if regs.n_rows < 1:
        raise ValueError("empty training set")
    rng = np.random.default_rng(seed)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        value.append(y[rows].mean())
        node = len(feature) - 1
        split = _best_split(X, y, rows, rng) if rows.size > 1 else None
        return node, split

    counter = 0
    heap = []
    node, split = new_node(np.arange(regs.n_rows))
    if split is not None:
        heapq.heappush(heap, (-split[0], counter, node, split))
    leaf_count = 1
    while leaf_count < max_leaves and heap:
        _, _, node, (gain, feat, thr, rows_l, rows_r) = heapq.heappop(heap)
        feature[node] = feat
        threshold[node] = thr
        for rows, side in ((rows_l, left), (rows_r, right)):
            counter += 1
            child, child_split = new_node(rows)
            side[node] = child
            if child_split is not None:
                heapq.heappush(heap, (-child_split[0], counter, child, child_split))
        leaf_count += 1

    return RegressionTree(
        feature=np.asarray(feature, dtype=np.intp),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.intp),
        right=np.asarray(right, dtype=np.intp),
        value=np.asarray(value, dtype=float),
        leaf_count=leaf_count,
        n_features=X.shape[1],
    )


def fit_forest(regs: RegressorSet, total_leaf_budget: int, seed: int) -> Forest:
    """Spend a total leaf budget on one tree, or on several interpolating ones.

    Up to one leaf per training row the budget buys a single tree. Past
    that, round(budget / rows) trees are each grown on the full training
    set (no bootstrap) until they interpolate, under distinct member seeds.
    """
    if total_leaf_budget < 1:
        raise ValueError("total_leaf_budget must be >= 1")
    n = regs.n_rows
    if n < 1:
        raise ValueError("empty training set")
    if total_leaf_budget <= n:
        trees = (fit_tree(regs, total_leaf_budget, seed),)
    else:
        n_trees = round(total_leaf_budget / n)
        trees = tuple(
            fit_tree(regs, n, derive_seed(seed, b)) for b in range(n_trees)
        )
    return Forest(trees=trees, total_leaves=sum(t.leaf_count for t in trees))


def predict(model, x) -> float:
    """Single-row prediction for a tree or a forest."""
    return model.predict_one(x)
