"""Segment aggregation, confusion counts, ROC and AUC."""

from dataclasses import dataclass

import numpy as np

DEFAULT_TRIM = 0.3


def aggregate_segment(sample_probs, trim=DEFAULT_TRIM):
    """Trimmed mean of one segment's per-window probabilities.

    Sorts, drops floor(trim*n) values from each end and averages the
    rest; when nothing survives the trim, falls back to the plain mean.
    """
    p = np.asarray(sample_probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError("cannot aggregate an empty probability list")
    if not 0.0 <= trim <= 1.0:
        raise ValueError("trim must be in [0, 1]")
    k = int(trim * p.size)
    mid = np.sort(p)[k:p.size - k]
    return float(mid.mean()) if mid.size else float(p.mean())


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def confusion_and_accuracy(scores, labels, threshold=0.5):
    """Threshold scores and count against 0/1 labels (disease = 1).

    Returns (ConfusionMatrix, accuracy, sensitivity, specificity).
    Sensitivity/specificity are 0 when their class is absent.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise ValueError(f"length mismatch: {s.shape} scores vs "
                         f"{y.shape} labels")
    if s.size == 0:
        raise ValueError("nothing to score")
    pred = s > threshold
    pos = y == 1
    tp = int(np.sum(pred & pos))
    fp = int(np.sum(pred & ~pos))
    tn = int(np.sum(~pred & ~pos))
    fn = int(np.sum(~pred & pos))
    cm = ConfusionMatrix(tp, fp, tn, fn)
    acc = (tp + tn) / s.size
    sens = tp / (tp + fn) if tp + fn else 0.0
    spec = tn / (tn + fp) if tn + fp else 0.0
    return cm, acc, sens, spec


def _midranks(values):
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sv = values[order]
    i = 0
    while i < values.size:
        j = i
        while j < values.size and sv[j] == sv[i]:
            j += 1
        ranks[order[i:j]] = 0.5 * (i + j + 1)
        i = j
    return ranks


def roc_auc(scores, labels):
    """AUC by the Mann-Whitney statistic plus a threshold-swept ROC.

    Ties count half.  The trapezoidal area under the returned curve
    equals the rank statistic.  Returns (auc, [(fpr, tpr), ...]).
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels) == 1
    n1 = int(y.sum())
    n0 = s.size - n1
    if n1 == 0 or n0 == 0:
        raise ValueError("AUC needs both classes in the labels")
    ranks = _midranks(s)
    auc = (ranks[y].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0)

    points = [(0.0, 0.0)]
    for t in np.unique(s)[::-1]:
        pred = s >= t
        points.append((float(np.sum(pred & ~y) / n0),
                       float(np.sum(pred & y) / n1)))
    return float(auc), points


def trapezoid_area(points):
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area
