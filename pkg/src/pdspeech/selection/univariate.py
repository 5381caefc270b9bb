"""Univariate filter scores: fisher, t-score, f-score, gini gain.

All four score each feature column independently against the binary
label; higher is better (gini is returned as impurity reduction, so it
is already oriented that way).
"""

from __future__ import annotations

import numpy as np

_VAR_FLOOR = 1e-12


def _class_split(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x d with matching labels")
    classes = np.unique(y)
    if classes.size != 2:
        raise ValueError("need exactly two classes present")
    pos, neg = X[y == classes.max()], X[y == classes.min()]
    if len(pos) < 2 or len(neg) < 2:
        raise ValueError("each class needs at least 2 rows")
    return X, pos, neg


def fisher_scores(X, y) -> np.ndarray:
    """Sum_c n_c (mu_c - mu)^2 / Sum_c n_c var_c with population variances."""
    X, pos, neg = _class_split(X, y)
    mu = X.mean(axis=0)
    num = (len(pos) * (pos.mean(axis=0) - mu) ** 2
           + len(neg) * (neg.mean(axis=0) - mu) ** 2)
    den = len(pos) * pos.var(axis=0) + len(neg) * neg.var(axis=0)
    return num / np.maximum(den, _VAR_FLOOR)


def t_scores(X, y) -> np.ndarray:
    """|mu+ - mu-| / sqrt(s+^2/n+ + s-^2/n-) with sample variances."""
    _, pos, neg = _class_split(X, y)
    se2 = pos.var(axis=0, ddof=1) / len(pos) + neg.var(axis=0, ddof=1) / len(neg)
    return np.abs(pos.mean(axis=0) - neg.mean(axis=0)) / np.sqrt(
        np.maximum(se2, _VAR_FLOOR))


def f_scores(X, y) -> np.ndarray:
    """((mu+ - mu)^2 + (mu- - mu)^2) / (s+^2 + s-^2) with sample variances."""
    X, pos, neg = _class_split(X, y)
    mu = X.mean(axis=0)
    num = (pos.mean(axis=0) - mu) ** 2 + (neg.mean(axis=0) - mu) ** 2
    den = pos.var(axis=0, ddof=1) + neg.var(axis=0, ddof=1)
    return num / np.maximum(den, _VAR_FLOOR)


def gini_scores(X, y) -> np.ndarray:
    """Best-threshold gini impurity reduction per feature.

    Thresholds are midpoints between consecutive distinct sorted values;
    a constant feature has no threshold and scores 0.
    """
    X, _, _ = _class_split(X, y)
    y = np.asarray(y)
    y01 = (y == np.unique(y).max()).astype(np.int64)
    n = X.shape[0]
    n1 = y01.sum()
    parent = 1.0 - (n1 / n) ** 2 - ((n - n1) / n) ** 2

    out = np.empty(X.shape[1])
    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ones = np.cumsum(y01[order])[:-1].astype(np.float64)
        valid = xs[1:] != xs[:-1]
        if not np.any(valid):
            out[j] = 0.0
            continue
        left_gini = 1.0 - (ones / left_n) ** 2 - ((left_n - ones) / left_n) ** 2
        rones = n1 - ones
        right_gini = (1.0 - (rones / right_n) ** 2
                      - ((right_n - rones) / right_n) ** 2)
        weighted = (left_n * left_gini + right_n * right_gini) / n
        out[j] = parent - weighted[valid].min()
    return out
