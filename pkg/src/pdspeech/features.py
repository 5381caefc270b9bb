"""Per-segment feature vectors and fold-local standardization.

Each segment's 40 x n MFCC matrix and its first and second derivatives
are summarized row-wise by four statistics, giving the canonical
480-entry vector: index = d*160 + c*4 + s for derivative order d in
{0,1,2}, coefficient slot c in {0..39} and statistic s in
{mean, std, skew, kurt}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import delta

VECTOR_LENGTH = 480
_STD_FLOOR = 1e-12
_MOMENT_FLOOR = 1e-24


def segment_statistics(row) -> tuple[float, float, float, float]:
    """(mean, std, skew, excess kurtosis) with population moments.

    Skew and kurtosis are defined as 0 when the variance is degenerate.
    """
    x = np.asarray(row, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("row must be a non-empty 1-d sequence")
    m1 = x.mean()
    d = x - m1
    m2 = np.mean(d * d)
    if m2 < _MOMENT_FLOOR:
        return float(m1), float(np.sqrt(max(m2, 0.0))), 0.0, 0.0
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    return (float(m1), float(np.sqrt(m2)),
            float(m3 / m2 ** 1.5), float(m4 / (m2 * m2) - 3.0))


def _row_stats_block(matrix: np.ndarray) -> np.ndarray:
    """Statistics for every row of one derivative order, shape (rows, 4)."""
    # row-at-a-time through the same scalar path as segment_statistics:
    # a vectorized variant differs in the last ulp (array pow vs scalar
    # pow) and the packed vector is contracted to match per-row
    # statistics exactly
    return np.array([segment_statistics(row) for row in matrix])


def build_feature_vector(mfcc_matrix) -> np.ndarray:
    """Pack the 480 statistics of a 40 x n MFCC matrix."""
    m = np.asarray(mfcc_matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != 40 or m.shape[1] < 1:
        raise ValueError("expected a 40 x n MFCC matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("MFCC matrix contains non-finite entries")
    blocks = [_row_stats_block(m),
              _row_stats_block(delta(m, 1)),
              _row_stats_block(delta(m, 2))]
    vec = np.concatenate([b.reshape(-1) for b in blocks])
    assert vec.shape == (VECTOR_LENGTH,)
    return vec


@dataclass(frozen=True)
class Standardizer:
    """Column-wise affine map fitted on training rows only."""

    mean: np.ndarray
    std: np.ndarray


def fit_standardizer(X) -> Standardizer:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a standardizer")
    std = X.std(axis=0)
    return Standardizer(mean=X.mean(axis=0),
                        std=np.maximum(std, _STD_FLOOR))


def apply_standardizer(s: Standardizer, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return (X - s.mean) / s.std
