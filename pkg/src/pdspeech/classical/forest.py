"""Random forest of CART trees with gini splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_features: int | None = None  # None = floor(sqrt(n_features))
    min_leaf: int = 1
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


@dataclass
class _Tree:
    feature: np.ndarray    # -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray      # majority label, valid at leaves


@dataclass
class ForestModel:
    config: ForestConfig
    trees: list
    n_features: int


def _best_split(X, y, cols, min_leaf):
    """(weighted gini, column, threshold) of the best midpoint split."""
    n = y.size
    n1 = int(y.sum())
    best_g, best_c, best_t = np.inf, -1, 0.0
    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n
    for c in cols:
        order = np.argsort(X[:, c], kind="stable")
        xs = X[order, c]
        ones = np.cumsum(y[order])[:-1].astype(np.float64)
        valid = xs[1:] != xs[:-1]
        if min_leaf > 1:
            pos = np.arange(1, n)
            valid &= (pos >= min_leaf) & (pos <= n - min_leaf)
        if not np.any(valid):
            continue
        gl = 1.0 - (ones / left_n) ** 2 - ((left_n - ones) / left_n) ** 2
        rones = n1 - ones
        gr = (1.0 - (rones / right_n) ** 2
              - ((right_n - rones) / right_n) ** 2)
        wg = (left_n * gl + right_n * gr) / n
        wg[~valid] = np.inf
        i = int(np.argmin(wg))
        if wg[i] < best_g - 1e-15:
            best_g, best_c, best_t = wg[i], c, 0.5 * (xs[i] + xs[i + 1])
    return best_g, best_c, best_t


def _grow_tree(X, y, rng, max_features, min_leaf) -> _Tree:
    d = X.shape[1]
    feat_l, thr_l, left_l, right_l, lab_l = [], [], [], [], []

    def new_node():
        feat_l.append(-1)
        thr_l.append(0.0)
        left_l.append(-1)
        right_l.append(-1)
        lab_l.append(0)
        return len(feat_l) - 1

    root = new_node()
    work = [(np.arange(y.size), root)]
    while work:
        rows, node = work.pop()
        ys = y[rows]
        ones = int(ys.sum())
        if ones == 0 or ones == ys.size or ys.size < 2 * min_leaf:
            lab_l[node] = int(ones * 2 > ys.size)
            continue
        cols = rng.choice(d, size=min(max_features, d), replace=False)
        _, c, t = _best_split(X[rows], ys, cols, min_leaf)
        if c < 0:
            lab_l[node] = int(ones * 2 > ys.size)
            continue
        go_left = X[rows, c] <= t
        feat_l[node] = int(c)
        thr_l[node] = float(t)
        li, ri = new_node(), new_node()
        left_l[node], right_l[node] = li, ri
        work.append((rows[go_left], li))
        work.append((rows[~go_left], ri))
    return _Tree(feature=np.array(feat_l), threshold=np.array(thr_l),
                 left=np.array(left_l), right=np.array(right_l),
                 label=np.array(lab_l))


def _tree_predict(tree: _Tree, X) -> np.ndarray:
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    cur = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        node = cur[active]
        leaf = tree.feature[node] < 0
        done = active[leaf]
        out[done] = tree.label[cur[done]]
        active = active[~leaf]
        if not active.size:
            break
        node = cur[active]
        go_left = X[active, tree.feature[node]] <= tree.threshold[node]
        cur[active] = np.where(go_left, tree.left[node], tree.right[node])
    return out


def train_random_forest(X, y, config: ForestConfig = ForestConfig()) -> ForestModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x d with matching labels")
    if np.unique(y).size != 2:
        raise ValueError("both classes must be present")
    y01 = (y == np.unique(y).max()).astype(np.int64)

    d = X.shape[1]
    max_features = (config.max_features if config.max_features
                    else max(1, int(np.sqrt(d))))
    trees = []
    for ss in np.random.SeedSequence(config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(ss)
        if config.bootstrap:
            rows = rng.integers(0, y01.size, y01.size)
        else:
            rows = np.arange(y01.size)
        trees.append(_grow_tree(X[rows], y01[rows], rng, max_features,
                                config.min_leaf))
    return ForestModel(config=config, trees=trees, n_features=d)


def forest_predict(model: ForestModel, X) -> tuple[np.ndarray, np.ndarray]:
    """(labels, PD probabilities) with probability = tree-vote fraction."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ValueError("dimension mismatch with the trained model")
    votes = np.zeros(X.shape[0])
    for tree in model.trees:
        votes += _tree_predict(tree, X)
    prob = votes / len(model.trees)
    return (prob > 0.5).astype(np.int64), prob
