"""k-nearest-neighbor classification."""

from __future__ import annotations

import numpy as np


def knn_scores(train_X, train_y, X, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(labels, PD vote fractions) for each row of X.

    Euclidean distance, majority vote; an exact tie goes to the class of
    the single nearest neighbor.
    """
    train_X = np.asarray(train_X, dtype=np.float64)
    train_y = np.asarray(train_y)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if train_X.shape[0] == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= train_X.shape[0]:
        raise ValueError(f"k must be in [1, {train_X.shape[0]}]")
    if X.shape[1] != train_X.shape[1]:
        raise ValueError("dimension mismatch with the training set")

    d2 = (np.sum(X * X, axis=1)[:, None]
          + np.sum(train_X * train_X, axis=1)[None, :]
          - 2.0 * X @ train_X.T)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = (train_y[order] == 1)
    frac = votes.mean(axis=1)
    labels = np.where(frac > 0.5, 1, 0)
    tie = frac == 0.5
    labels[tie] = (train_y[order[tie, 0]] == 1).astype(int)
    return labels.astype(np.int64), frac


def knn_predict(train_X, train_y, x, k: int) -> tuple[int, float]:
    """Single-query convenience wrapper around knn_scores."""
    labels, frac = knn_scores(train_X, train_y, np.atleast_2d(x), k)
    return int(labels[0]), float(frac[0])
