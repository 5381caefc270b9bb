"""Turning raw scores into rankings and column subsets."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FeatureRanking:
    method: str
    order: np.ndarray   # permutation of feature indices, best first
    scores: np.ndarray  # raw scores, index-aligned with the data columns

    def __post_init__(self):
        d = self.scores.size
        if sorted(self.order.tolist()) != list(range(d)):
            raise ValueError("order is not a permutation of the features")


def rank_from_scores(scores, method: str = "",
                     higher_is_better: bool = True) -> FeatureRanking:
    """Stable best-first ordering; ties broken by ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise ValueError("scores must be a non-empty 1-d array")
    nan = np.flatnonzero(np.isnan(scores))
    if nan.size:
        raise ValueError(f"score for feature {nan[0]} is NaN")
    key = -scores if higher_is_better else scores
    order = np.argsort(key, kind="stable")
    return FeatureRanking(method=method, order=order, scores=scores)


def select_top_m(ranking: FeatureRanking, m: int, X) -> np.ndarray:
    """Columns of X for the m best features, best first."""
    X = np.asarray(X)
    d = ranking.scores.size
    if X.ndim != 2 or X.shape[1] != d:
        raise ValueError("X column count does not match the ranking")
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}]")
    return X[:, ranking.order[:m]]


def write_ranking_csv(ranking: FeatureRanking, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "feature_index", "score", "method"])
        for rank, idx in enumerate(ranking.order, start=1):
            w.writerow([rank, int(idx), repr(float(ranking.scores[idx])),
                        ranking.method])
