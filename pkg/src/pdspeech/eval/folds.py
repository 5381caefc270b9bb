"""Leave-one-subject-out fold construction."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Fold:
    test_subject: str
    train_idx: np.ndarray
    test_idx: np.ndarray


def loso_folds(subjects):
    """One fold per subject; that subject's segments form the test set.

    subjects: per-segment subject id, any hashable array-like.  Fold
    order follows first appearance in the input.
    """
    subjects = np.asarray(subjects)
    if subjects.size == 0:
        raise ValueError("no segments to fold")
    _, first = np.unique(subjects, return_index=True)
    ordered = subjects[np.sort(first)]
    if ordered.size < 2:
        raise ValueError("leave-one-subject-out needs at least 2 subjects")
    folds = []
    for s in ordered:
        test = np.flatnonzero(subjects == s)
        train = np.flatnonzero(subjects != s)
        # leak guard: a subject must never sit on both sides
        assert not np.any(subjects[train] == s)
        assert train.size + test.size == subjects.size
        folds.append(Fold(str(s), train, test))
    return folds
