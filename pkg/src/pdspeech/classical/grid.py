"""Hyperparameter grid search with subject-grouped inner cross-validation.

Folds never split a subject: distinct group ids are sorted and dealt
round-robin into up to five folds (fewer when there are fewer groups).
The winner is the grid point with the best mean validation accuracy;
ties keep the earliest point in grid order.
"""

from __future__ import annotations

import numpy as np


def grouped_folds(groups, n_folds: int = 5) -> list:
    """Validation-index arrays, one per fold, grouped by subject."""
    groups = list(groups)
    uniq = sorted(set(groups))
    if len(uniq) < 3:
        raise ValueError("need at least 3 distinct groups")
    n_folds = min(n_folds, len(uniq))
    assign = {g: i % n_folds for i, g in enumerate(uniq)}
    fold_of = np.array([assign[g] for g in groups])
    return [np.flatnonzero(fold_of == f) for f in range(n_folds)]


def grid_search(X, y, groups, fit_predict, grid, n_folds: int = 5):
    """Best (params, mean accuracy) over grid points.

    fit_predict(params, train_X, train_y, val_X) -> predicted labels.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    folds = grouped_folds(groups, n_folds)

    best_acc, best_params = -1.0, None
    for params in grid:
        accs = []
        for val in folds:
            mask = np.ones(y.size, dtype=bool)
            mask[val] = False
            if np.unique(y[mask]).size < 2:
                # degenerate inner split: the classifier cannot train,
                # score the constant-class prediction instead
                yhat = np.full(val.size, y[mask][0])
            else:
                yhat = fit_predict(params, X[mask], y[mask], X[val])
            accs.append(float(np.mean(yhat == y[val])))
        mean_acc = float(np.mean(accs))
        if mean_acc > best_acc + 1e-15:
            best_acc, best_params = mean_acc, params
    return best_params, best_acc


def svm_default_grid(kind: str = "rbf") -> list:
    cs = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    if kind == "rbf":
        return [{"C": c, "gamma": g}
                for c in cs for g in ["scale", 1e-4, 1e-3, 1e-2, 1e-1]]
    if kind == "polynomial":
        return [{"C": c, "degree": d} for c in cs for d in [2, 3]]
    if kind == "linear":
        return [{"C": c} for c in cs]
    raise ValueError(f"unknown kernel kind {kind!r}")


def knn_default_grid() -> list:
    return [{"k": k} for k in range(1, 16, 2)]
