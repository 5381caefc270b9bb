"""Iterative trace-ratio feature scoring.

Maximizes trace of between-class scatter over within-class scatter for
a subset of m features, using the per-feature scatter diagonals: repeat
score_i = b_i - lambda * w_i, take the top m, update lambda to the
selected-subset ratio, until lambda stops moving.
"""

from __future__ import annotations

import numpy as np

_W_FLOOR = 1e-12


def scatter_diagonals(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature between-class (b) and within-class (w) scatter."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x d with matching labels")
    classes = np.unique(y)
    if classes.size != 2:
        raise ValueError("need exactly two classes present")
    mu = X.mean(axis=0)
    b = np.zeros(X.shape[1])
    w = np.zeros(X.shape[1])
    for c in classes:
        Xc = X[y == c]
        if len(Xc) < 2:
            raise ValueError("each class needs at least 2 rows")
        b += len(Xc) * (Xc.mean(axis=0) - mu) ** 2
        w += ((Xc - Xc.mean(axis=0)) ** 2).sum(axis=0)
    return b, w


def trace_ratio_scores(X, y, m_target: int = 100, tol: float = 1e-8,
                       max_iter: int = 100) -> np.ndarray:
    b, w = scatter_diagonals(X, y)
    d = b.size
    if not 1 <= m_target <= d:
        raise ValueError(f"m_target must be in [1, {d}]")

    lam = 0.0
    for _ in range(max_iter):
        scores = b - lam * w
        # ties by ascending feature index: stable argsort on -scores
        top = np.argsort(-scores, kind="stable")[:m_target]
        lam_new = b[top].sum() / max(w[top].sum(), _W_FLOOR)
        if abs(lam_new - lam) < tol:
            lam = lam_new
            break
        lam = lam_new
    return b - lam * w
