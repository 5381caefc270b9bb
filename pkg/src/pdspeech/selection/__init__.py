"""Filter feature selection: nine ranking methods plus subset selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ranking import (FeatureRanking, rank_from_scores, select_top_m,
                      write_ranking_csv)
from .relieff import minmax_scale, relieff_scores
from .sparse import (SparseResult, ll_l21_solve, ls_l21_solve, one_hot_targets,
                     rfs_solve, row_norms, sparse_l21_rank)
from .trace_ratio import scatter_diagonals, trace_ratio_scores
from .univariate import f_scores, fisher_scores, gini_scores, t_scores

METHODS = ("fisher", "relieff", "trace_ratio", "rfs", "ls_l21", "ll_l21",
           "gini", "f_score", "t_score")


@dataclass(frozen=True)
class LabeledMatrix:
    """Feature rows with binary labels and per-row subject ids."""

    X: np.ndarray
    y: np.ndarray           # 1 = PD, 0 = HC
    groups: tuple = field(default=())

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "groups", tuple(self.groups))
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("X must be N x d with matching labels")
        if len(self.groups) not in (0, X.shape[0]):
            raise ValueError("groups length must match rows")
        if np.unique(y).size != 2:
            raise ValueError("both classes must be present")


def compute_ranking(X, y, method: str, **params) -> FeatureRanking:
    """Run one of the nine ranking methods; all return higher-is-better."""
    if method == "fisher":
        scores = fisher_scores(X, y)
    elif method == "f_score":
        scores = f_scores(X, y)
    elif method == "t_score":
        scores = t_scores(X, y)
    elif method == "gini":
        scores = gini_scores(X, y)
    elif method == "relieff":
        scores = relieff_scores(X, y, **params)
    elif method == "trace_ratio":
        scores = trace_ratio_scores(X, y, **params)
    elif method in ("ls_l21", "ll_l21", "rfs"):
        loss = {"ls_l21": "least_squares", "ll_l21": "logistic",
                "rfs": "rfs"}[method]
        scores = sparse_l21_rank(X, y, loss=loss, **params).scores
    else:
        raise ValueError(f"unknown ranking method {method!r}; "
                         f"choose from {METHODS}")
    return rank_from_scores(scores, method=method)


__all__ = [
    "METHODS", "FeatureRanking", "LabeledMatrix", "SparseResult",
    "compute_ranking", "f_scores", "fisher_scores", "gini_scores",
    "ll_l21_solve", "ls_l21_solve", "minmax_scale", "one_hot_targets",
    "rank_from_scores", "relieff_scores", "rfs_solve", "row_norms",
    "scatter_diagonals", "select_top_m", "sparse_l21_rank", "t_scores",
    "trace_ratio_scores", "write_ranking_csv",
]
