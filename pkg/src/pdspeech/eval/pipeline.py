"""Full evaluation runs: ingest, features, LOSO, metrics, report."""

from contextlib import contextmanager
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from ..classical import (ForestConfig, KernelSpec, forest_predict,
                         grid_search, knn_default_grid, knn_scores,
                         svm_decision, svm_default_grid, train_random_forest,
                         train_svm)
from ..corpus import Group, load_manifest, load_segment
from ..deepnet import (TrainConfig, cnn_train, predict_sample_probs,
                       stack_windows, window_samples)
from ..dsp import mfcc
from ..features import apply_standardizer, build_feature_vector, \
    fit_standardizer
from ..selection import METHODS, compute_ranking, select_top_m
from .folds import loso_folds
from .metrics import DEFAULT_TRIM, aggregate_segment, confusion_and_accuracy, \
    roc_auc

REPORT_VERSION = 1

_BRANCHES = ("classical", "cnn", "both")
_CLASSIFIERS = ("svm", "knn", "forest")


class PipelineError(RuntimeError):
    """A stage failure; the message carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@contextmanager
def _stage(name):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, str(exc)) from exc


@dataclass(frozen=True)
class PipelineConfig:
    manifest: str
    task: int | None = None
    branch: str = "classical"
    method: str = "ls_l21"
    m: int = 100
    classifier: str = "svm"
    kernel: str = "rbf"
    C: float = 4.0
    gamma: object = "scale"
    degree: int = 3
    k: int = 5
    n_trees: int = 100
    grid: bool = False
    trim: float = DEFAULT_TRIM
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if self.branch not in _BRANCHES:
            raise ValueError(f"branch must be one of {_BRANCHES}")
        if self.method not in METHODS:
            raise ValueError(f"unknown ranking method {self.method!r}")
        if self.classifier not in _CLASSIFIERS:
            raise ValueError(f"classifier must be one of {_CLASSIFIERS}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.task is not None and self.task not in (1, 2, 3):
            raise ValueError("task filter must be 1, 2 or 3")

    def kernel_spec(self):
        return KernelSpec(kind=self.kernel, degree=self.degree,
                          gamma=self.gamma)


def config_echo(config):
    echo = asdict(config)
    echo["manifest"] = str(config.manifest)
    return echo


def _ingest(config):
    manifest = load_manifest(config.manifest)
    entries = [e for e in manifest.entries
               if config.task is None or e.task.value == config.task]
    if not entries:
        raise ValueError(f"no segments left after task filter {config.task}")
    groups = {e.group for e in entries}
    if len(groups) < 2:
        raise ValueError("need segments from both groups to evaluate")
    segments = [load_segment(manifest, e) for e in entries]
    return entries, segments


def _segment_arrays(entries):
    labels = np.array([1 if e.group is Group.PD else 0 for e in entries])
    subjects = np.array([e.subject for e in entries])
    tasks = np.array([e.task.value for e in entries])
    return labels, subjects, tasks


def _fit_fold_classifier(Xt, yt, subjects_t, config):
    """Train one fold's classifier, optionally grid-searched, and
    return a scoring closure over test rows."""
    spec = config.kernel_spec()
    if config.classifier == "svm":
        C = config.C
        if config.grid:
            def fit_predict(params, Xa, ya, Xb):
                ps = KernelSpec(kind=config.kernel,
                                degree=params.get("degree", config.degree),
                                gamma=params.get("gamma", config.gamma))
                model = train_svm(Xa, ya, ps, C=params["C"],
                                  seed=config.seed)
                return svm_decision(model, Xb) > 0
            params, _ = grid_search(Xt, yt, subjects_t, fit_predict,
                                    svm_default_grid(config.kernel))
            spec = KernelSpec(kind=config.kernel,
                              degree=params.get("degree", config.degree),
                              gamma=params.get("gamma", config.gamma))
            C = params["C"]
        model = train_svm(Xt, yt, spec, C=C, seed=config.seed)
        return lambda Xv: svm_decision(model, Xv)
    if config.classifier == "knn":
        k = config.k
        if config.grid:
            def fit_predict(params, Xa, ya, Xb):
                return knn_scores(Xa, ya, Xb, params["k"])[0]
            params, _ = grid_search(Xt, yt, subjects_t, fit_predict,
                                    knn_default_grid())
            k = params["k"]
        return lambda Xv: knn_scores(Xt, yt, Xv, k)[1]
    fc = ForestConfig(n_trees=config.n_trees, seed=config.seed)
    model = train_random_forest(Xt, yt, fc)
    return lambda Xv: forest_predict(model, Xv)[1]


def loso_scores_classical(X, y, subjects, config):
    """Per-fold standardize + fit + score; returns per-segment scores.

    Scores are SVM decision values (threshold 0) or vote fractions
    (threshold 0.5) depending on the configured classifier.
    """
    scores = np.empty(len(y), dtype=np.float64)
    for fold in loso_folds(subjects):
        std = fit_standardizer(X[fold.train_idx])
        Xt = apply_standardizer(std, X[fold.train_idx])
        Xv = apply_standardizer(std, X[fold.test_idx])
        score = _fit_fold_classifier(Xt, y[fold.train_idx],
                                     subjects[fold.train_idx], config)
        scores[fold.test_idx] = score(Xv)
    return scores


def classical_threshold(config):
    return 0.0 if config.classifier == "svm" else 0.5


def _metrics_block(scores, labels, tasks, threshold):
    cm, acc, sens, spec = confusion_and_accuracy(scores, labels, threshold)
    auc, roc = roc_auc(scores, labels)
    per_task = {}
    for t in sorted(set(int(v) for v in tasks)):
        sel = tasks == t
        cm_t, acc_t, _, _ = confusion_and_accuracy(scores[sel], labels[sel],
                                                   threshold)
        block = {"n_segments": int(sel.sum()), "accuracy": float(acc_t),
                 "confusion": asdict(cm_t)}
        if len(set(labels[sel].tolist())) == 2:
            block["auc"] = float(roc_auc(scores[sel], labels[sel])[0])
        else:
            block["auc"] = None
        per_task[str(t)] = block
    return {
        "confusion": asdict(cm),
        "accuracy": float(acc),
        "sensitivity": float(sens),
        "specificity": float(spec),
        "auc": float(auc),
        "roc": [[float(a), float(b)] for a, b in roc],
        "per_task": per_task,
    }


def _per_segment_rows(entries, labels, scores, indices=None):
    rows = []
    idx = range(len(entries)) if indices is None else indices
    for i in idx:
        rows.append({"segment": int(i),
                     "subject": entries[i].subject,
                     "task": int(entries[i].task.value),
                     "label": int(labels[i]),
                     "score": float(scores[i])})
    return rows


def _feature_matrix(mats):
    return np.array([build_feature_vector(m) for m in mats])


def _rank_features(X, y, method):
    """Rank features on the full matrix (used by the sweep and the
    ranking export, where the rank order itself is the product).

    Features are put on a common scale first so scale-sensitive
    rankers see comparable columns.
    """
    Xs = apply_standardizer(fit_standardizer(X), X)
    return compute_ranking(Xs, y, method)


def loso_scores_ranked(X, y, subjects, config):
    """LOSO scores with feature ranking redone inside every fold.

    Ranking on the full matrix would let the held-out subject vote on
    which features survive, which inflates null-data scores well past
    chance; keeping selection inside the fold is what makes the
    evaluation leak-free.
    """
    scores = np.empty(len(y), dtype=np.float64)
    m = min(config.m, X.shape[1])
    for fold in loso_folds(subjects):
        tr, te = fold.train_idx, fold.test_idx
        std_all = fit_standardizer(X[tr])
        ranking = compute_ranking(apply_standardizer(std_all, X[tr]),
                                  y[tr], config.method)
        Xm = select_top_m(ranking, m, X)
        std = fit_standardizer(Xm[tr])
        Xt = apply_standardizer(std, Xm[tr])
        Xv = apply_standardizer(std, Xm[te])
        score = _fit_fold_classifier(Xt, y[tr], subjects[tr], config)
        scores[te] = score(Xv)
    return scores


def _run_classical(mats, entries, labels, subjects, tasks, config):
    with _stage("features"):
        X = _feature_matrix(mats)
    with _stage("classify"):
        scores = loso_scores_ranked(X, labels, subjects, config)
    with _stage("metrics"):
        block = _metrics_block(scores, labels, tasks,
                               classical_threshold(config))
    block["m"] = int(min(config.m, X.shape[1]))
    block["per_segment"] = _per_segment_rows(entries, labels, scores)
    return block


def _balance_windows(indices, y, seed):
    """Subsample the majority class so both labels appear equally often.

    An imbalanced fold lets the network cut its loss by predicting the
    training prior, and under leave-one-subject-out that prior always
    tilts away from the held-out subject's class, dragging null-data
    accuracy below chance.  Balancing removes the tilt; folds that are
    single-class already (degenerate corpora) are left alone.
    """
    rng = np.random.default_rng(seed)
    pos = indices[y[indices] == 1]
    neg = indices[y[indices] == 0]
    keep = min(pos.size, neg.size)
    if keep == 0:
        return indices
    if pos.size > keep:
        pos = rng.choice(pos, size=keep, replace=False)
    if neg.size > keep:
        neg = rng.choice(neg, size=keep, replace=False)
    return np.sort(np.concatenate([pos, neg]))


def _run_cnn(mats, entries, labels, subjects, tasks, config):
    with _stage("windows"):
        wins = []
        for i, m in enumerate(mats):
            wins.extend(window_samples(m, segment=i))
        values, win_seg = stack_windows(wins)
        if values.shape[0] == 0:
            raise ValueError("no segment is long enough to window")
        win_y = labels[win_seg]
        covered = np.unique(win_seg)
    with _stage("train"):
        seg_scores = np.full(len(labels), np.nan)
        for fold_i, fold in enumerate(loso_folds(subjects)):
            train_mask = np.isin(win_seg, fold.train_idx)
            test_mask = np.isin(win_seg, fold.test_idx)
            if not test_mask.any():
                continue
            cfg = replace(config.train, seed=config.train.seed + fold_i)
            tr = _balance_windows(np.flatnonzero(train_mask), win_y, cfg.seed)
            params, _ = cnn_train(values[tr], win_y[tr], win_seg[tr], cfg)
            probs = predict_sample_probs(params, values[test_mask])
            seg_of_prob = win_seg[test_mask]
            for seg in np.unique(seg_of_prob):
                seg_scores[seg] = aggregate_segment(
                    probs[seg_of_prob == seg], config.trim)
    with _stage("metrics"):
        scored = np.flatnonzero(~np.isnan(seg_scores))
        block = _metrics_block(seg_scores[scored], labels[scored],
                               tasks[scored], 0.5)
    block["n_windows"] = int(values.shape[0])
    block["skipped_segments"] = [int(i) for i in range(len(labels))
                                 if i not in set(covered.tolist())]
    block["per_segment"] = _per_segment_rows(entries, labels, seg_scores,
                                             indices=scored.tolist())
    return block


def run_pipeline(config):
    """Execute the configured branches and assemble the report dict.

    The result is deterministic for a fixed config (timestamps are
    added only when the report is written).
    """
    with _stage("ingest"):
        entries, segments = _ingest(config)
        labels, subjects, tasks = _segment_arrays(entries)
    with _stage("mfcc"):
        mats = [mfcc(s.samples, s.sample_rate) for s in segments]

    branches = {}
    if config.branch in ("classical", "both"):
        branches["classical"] = _run_classical(mats, entries, labels,
                                               subjects, tasks, config)
    if config.branch in ("cnn", "both"):
        branches["cnn"] = _run_cnn(mats, entries, labels, subjects, tasks,
                                   config)

    return {
        "format_version": REPORT_VERSION,
        "seed": int(config.seed),
        "config": config_echo(config),
        "n_segments": int(len(entries)),
        "n_subjects": int(len(set(e.subject for e in entries))),
        "branches": branches,
    }


def auc_vs_m_sweep(X, y, subjects, ranking, m_values, config):
    """LOSO AUC at each requested feature-subset size.

    Returns (points, best) where points is a list of {"m", "auc"} and
    best is the smallest m attaining the highest AUC.
    """
    if len(m_values) == 0:
        raise ValueError("no m values requested")
    points = []
    for m in m_values:
        scores = loso_scores_classical(select_top_m(ranking, int(m), X), y,
                                       subjects, config)
        auc, _ = roc_auc(scores, y)
        points.append({"m": int(m), "auc": float(auc)})
    best = max(points, key=lambda p: p["auc"])
    return points, best


def run_sweep(config, m_values):
    """Classical-branch sweep over feature-subset sizes."""
    with _stage("ingest"):
        entries, segments = _ingest(config)
        labels, subjects, tasks = _segment_arrays(entries)
    with _stage("mfcc"):
        mats = [mfcc(s.samples, s.sample_rate) for s in segments]
    with _stage("features"):
        X = _feature_matrix(mats)
    with _stage("ranking"):
        ranking = _rank_features(X, labels, config.method)
    with _stage("sweep"):
        points, best = auc_vs_m_sweep(X, labels, subjects, ranking, m_values,
                                      config)
    return {
        "format_version": REPORT_VERSION,
        "seed": int(config.seed),
        "config": config_echo(config),
        "n_segments": int(len(entries)),
        "n_subjects": int(len(set(e.subject for e in entries))),
        "sweep": {"method": config.method,
                  "points": points,
                  "best_m": best["m"],
                  "best_auc": best["auc"]},
    }
