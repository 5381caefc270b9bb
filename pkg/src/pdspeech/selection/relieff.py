"""ReliefF feature weighting.

Classic parameterization: every instance serves as an anchor, k nearest
hits and k nearest misses by Manhattan distance on min-max scaled
features, per-feature weight accumulated as (miss diff - hit diff) /
(N * k).  Misses carry the class-prior factor P(miss class) /
(1 - P(anchor class)), which reduces to 1 in the two-class case.
"""

from __future__ import annotations

import numpy as np

_RANGE_FLOOR = 1e-12


def minmax_scale(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    rng = X.max(axis=0) - lo
    return (X - lo) / np.maximum(rng, _RANGE_FLOOR)


def relieff_scores(X, y, k: int = 10) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x d with matching labels")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size != 2:
        raise ValueError("need exactly two classes present")
    if k < 1 or np.any(counts < k + 1):
        raise ValueError(f"each class needs at least k+1={k + 1} rows")

    n = X.shape[0]
    Z = minmax_scale(X)
    prior = {c: cnt / n for c, cnt in zip(classes, counts)}

    # full Manhattan distance matrix; corpora here are a few hundred rows
    dist = np.abs(Z[:, None, :] - Z[None, :, :]).sum(axis=2)

    w = np.zeros(X.shape[1])
    for i in range(n):
        same = y == y[i]
        hit_idx = np.flatnonzero(same)
        hit_idx = hit_idx[hit_idx != i]
        hit_idx = hit_idx[np.argsort(dist[i, hit_idx], kind="stable")[:k]]
        w -= np.abs(Z[hit_idx] - Z[i]).sum(axis=0)

        for c in classes:
            if c == y[i]:
                continue
            factor = prior[c] / (1.0 - prior[y[i]])
            miss_idx = np.flatnonzero(y == c)
            miss_idx = miss_idx[np.argsort(dist[i, miss_idx], kind="stable")[:k]]
            w += factor * np.abs(Z[miss_idx] - Z[i]).sum(axis=0)
    return w / (n * k)
