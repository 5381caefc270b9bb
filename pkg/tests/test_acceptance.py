"""Acceptance gate: one test per release criterion.

Every test prints a single ``criterion N (name): PASS|FAIL`` line so a
full run reads as a checklist (run pytest with -s or -rP to see the
lines for passing tests too).  Oracles here are coded from scratch and
on purpose share no helpers with the unit tests or the library;
tolerances are pinned inline.  Criteria 1, 3 and 8 also pin wall-clock
budgets.
"""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pdspeech.classical import (KernelSpec, dual_objective, kkt_violation,
                                svm_decision, train_svm)
from pdspeech.corpus import SyntheticConfig, generate_synthetic_corpus
from pdspeech.cli import main as cli_main
from pdspeech.deepnet import (TrainConfig, cnn_backward, cnn_forward,
                              cnn_train, count_parameters, init_cnn_params,
                              save_checkpoint)
from pdspeech.deepnet.ops import bce_loss_and_grad
from pdspeech.dsp import mfcc
from pdspeech.eval import (PipelineConfig, aggregate_segment, loso_folds,
                           report_fingerprint, roc_auc, run_pipeline,
                           trapezoid_area)
from pdspeech.features import build_feature_vector
from pdspeech.selection import (fisher_scores, gini_scores, relieff_scores,
                                sparse_l21_rank, t_scores,
                                trace_ratio_scores)
from pdspeech.selection.trace_ratio import scatter_diagonals


@contextmanager
def criterion(number, name):
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"criterion {number} ({name}): FAIL", flush=True)
        raise
    print(f"criterion {number} ({name}): PASS  [{time.monotonic() - t0:.1f}s]",
          flush=True)


# -- 1: MFCC against a direct-DFT oracle ------------------------------------

def oracle_mfcc(x, sr):
    """Brute-force reference: explicit DFT matrix, per-filter triangle
    loops, explicit cosine transform.  No FFT, no library DCT."""
    n_fft, hop, n_mels = 2048, 512, 128
    fmin, fmax, floor = 0.0, 2000.0, 1e-10

    frames = (len(x) - n_fft) // hop + 1
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)
    bins = np.arange(n_fft // 2 + 1)
    dft = np.exp(-2j * np.pi * np.outer(bins, np.arange(n_fft)) / n_fft)
    power = np.empty((bins.size, frames))
    for t in range(frames):
        seg = x[t * hop:t * hop + n_fft] * w
        power[:, t] = np.abs(dft @ seg) ** 2

    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    pts = to_hz(np.linspace(to_mel(fmin), to_mel(fmax), n_mels + 2))
    freqs = bins * sr / n_fft
    bank = np.zeros((n_mels, bins.size))
    for i in range(n_mels):
        lo, mid, hi = pts[i], pts[i + 1], pts[i + 2]
        for j, f in enumerate(freqs):
            if lo < f <= mid:
                bank[i, j] = (f - lo) / (mid - lo)
            elif mid < f < hi:
                bank[i, j] = (hi - f) / (hi - mid)
        bank[i] *= 2.0 / (hi - lo)

    logmel = np.log(np.maximum(bank @ power, floor))
    i = np.arange(n_mels)
    basis = np.sqrt(2.0 / n_mels) * np.cos(
        np.pi * np.outer(i, 2 * i + 1) / (2 * n_mels))
    basis[0] /= np.sqrt(2.0)
    return (basis @ logmel)[4:44]


def test_criterion_1_dsp_oracle():
    with criterion(1, "dsp oracle"):
        t0 = time.monotonic()
        sr = 48000
        t = np.arange(sr) / sr
        rng = np.random.default_rng(2024)
        fixtures = [0.5 * np.sin(2 * np.pi * 300.0 * t),
                    0.5 * np.sin(2 * np.pi * 1500.0 * t),
                    0.1 * rng.standard_normal(sr)]
        for x in fixtures:
            got = mfcc(x, sr)
            want = oracle_mfcc(x, sr)
            assert got.shape == (40, 90)  # floor((48000-2048)/512)+1
            assert (np.linalg.norm(got - want) / np.linalg.norm(want)
                    < 1e-4)
            assert np.max(np.abs(got - want)) < 1e-4 * np.max(np.abs(want))
        assert time.monotonic() - t0 < 5.0


# -- 2: 480-entry feature vector against a naive layout ---------------------

def naive_stats(x):
    m1 = np.mean(x)
    d = x - m1
    m2 = np.mean(d * d)
    if m2 < 1e-24:
        return m1, np.sqrt(max(m2, 0.0)), 0.0, 0.0
    return (m1, np.sqrt(m2), np.mean(d ** 3) / m2 ** 1.5,
            np.mean(d ** 4) / (m2 * m2) - 3.0)


def naive_delta(m, order):
    for _ in range(order):
        n = m.shape[1]
        num = np.zeros_like(m)
        for t in range(n):
            for k in range(1, 5):
                num[:, t] += k * (m[:, min(t + k, n - 1)]
                                  - m[:, max(t - k, 0)])
        m = num / 60.0
    return m


def naive_feature_vector(mat):
    out = np.empty(480)
    for d_idx, m in enumerate([mat, naive_delta(mat, 1),
                               naive_delta(mat, 2)]):
        for c in range(40):
            for s, v in enumerate(naive_stats(m[c])):
                out[d_idx * 160 + c * 4 + s] = v
    return out


def test_criterion_2_feature_layout():
    with criterion(2, "feature layout"):
        rng = np.random.default_rng(99)
        for trial in range(100):
            n = int(rng.integers(1, 100))
            mat = rng.standard_normal((40, n)) * 10.0 ** rng.uniform(-2, 2)
            if trial % 7 == 0:
                mat[int(rng.integers(0, 40))] = 1.25  # degenerate row
            vec = build_feature_vector(mat)
            assert vec.shape == (480,)
            assert np.array_equal(vec, naive_feature_vector(mat))


# -- 3: feature-ranker oracles ----------------------------------------------

def test_criterion_3_ranker_oracles():
    with criterion(3, "ranker oracles"):
        t0 = time.monotonic()
        X4 = np.array([[0.0], [1.0], [2.0], [3.0]])
        y4 = np.array([0, 0, 1, 1])

        # hand formulas, population variance within classes
        mu0, mu1, mu = 0.5, 2.5, 1.5
        var0 = var1 = 0.25
        fisher = (2 * (mu0 - mu) ** 2 + 2 * (mu1 - mu) ** 2) \
            / (2 * var0 + 2 * var1)
        assert abs(fisher_scores(X4, y4)[0] - fisher) < 1e-9
        assert abs(fisher - 4.0) < 1e-12

        s0 = s1 = 0.5  # sample variance, ddof=1
        t_stat = abs(mu0 - mu1) / np.sqrt(s0 / 2 + s1 / 2)
        assert abs(t_scores(X4, y4)[0] - t_stat) < 1e-9
        assert abs(t_stat - 2.8284271247461903) < 1e-12

        # parent gini 0.5, the best threshold leaves pure halves
        assert abs(gini_scores(X4, y4)[0] - 0.5) < 1e-9

        # ReliefF, k=1: full enumeration over all four anchors
        vals = np.array([0.0, 0.1, 1.0, 1.1])
        yv = np.array([0, 0, 1, 1])
        span = vals.max() - vals.min()
        contrib = 0.0
        for i in range(4):
            same = [j for j in range(4) if j != i and yv[j] == yv[i]]
            other = [j for j in range(4) if yv[j] != yv[i]]
            hit = min(abs(vals[i] - vals[j]) for j in same)
            miss = min(abs(vals[i] - vals[j]) for j in other)
            contrib += (miss - hit) / span
        enum = contrib / 4
        got = relieff_scores(vals.reshape(-1, 1), yv, k=1)[0]
        assert abs(got - enum) < 1e-6

        # trace-ratio fixed point: recover the converged multiplier from
        # the returned scores (scores = b - lam*w), then the selected
        # subset must satisfy sum(b - lam*w) ~ 0
        rng = np.random.default_rng(7)
        yp = np.repeat([0, 1], 100)
        Xp = rng.standard_normal((200, 480))
        Xp[yp == 1, :10] += 2.0
        Xp = (Xp - Xp.mean(axis=0)) / Xp.std(axis=0)
        scores = trace_ratio_scores(Xp, yp, m_target=100)
        b, w = scatter_diagonals(Xp, yp)
        lam = np.median((b - scores) / np.maximum(w, 1e-12))
        top = np.argsort(-scores, kind="stable")[:100]
        assert abs(np.sum(b[top] - lam * w[top])) < 1e-6

        # sparse solvers: planted-feature recovery and monotone descent
        for loss in ("least_squares", "logistic", "rfs"):
            res = sparse_l21_rank(Xp, yp, loss=loss, gamma=0.1)
            top20 = set(np.argsort(-res.scores, kind="stable")[:20].tolist())
            assert len(top20 & set(range(10))) >= 9, loss
            assert np.all(np.diff(res.objective) <= 1e-9), loss

        assert time.monotonic() - t0 < 60.0


# -- 4: SMO optimality -------------------------------------------------------

def test_criterion_4_smo():
    with criterion(4, "smo"):
        rng = np.random.default_rng(41)
        kinds = ("rbf", "linear", "polynomial")
        for trial in range(20):
            n = int(rng.integers(8, 26))
            d = int(rng.integers(1, 6))
            X = rng.standard_normal((n, d))
            y = np.zeros(n, dtype=int)
            y[rng.permutation(n)[:n // 2]] = 1
            spec = KernelSpec(kind=kinds[trial % 3], gamma="scale")
            model = train_svm(X, y, spec, C=1.0, seed=trial)
            assert kkt_violation(model, tol=1e-3) == 0.0

        # symmetric two-point problem: the boundary sits at the origin
        model = train_svm(np.array([[-1.0], [1.0]]), np.array([0, 1]),
                          KernelSpec(kind="linear"), C=1.0)
        assert abs(svm_decision(model, np.array([[0.0]]))[0]) < 1e-6

        # dual value against a generic QP solver on a 6-point instance
        from scipy.optimize import minimize
        X6 = np.array([[0.0, 0.0], [1.0, 0.5], [0.2, 1.0],
                       [2.0, 2.0], [2.5, 1.0], [1.2, 1.8]])
        y6 = np.array([0, 0, 0, 1, 1, 1])
        gamma, C = 0.5, 2.0
        sq = np.sum(X6 ** 2, axis=1)
        K = np.exp(-gamma * (sq[:, None] + sq[None, :] - 2 * X6 @ X6.T))
        ypm = 2.0 * y6 - 1.0
        Q = np.outer(ypm, ypm) * K

        res = minimize(lambda a: 0.5 * a @ Q @ a - a.sum(),
                       np.zeros(6), jac=lambda a: Q @ a - 1.0,
                       bounds=[(0.0, C)] * 6,
                       constraints=[{"type": "eq",
                                     "fun": lambda a: a @ ypm,
                                     "jac": lambda a: ypm}],
                       method="SLSQP",
                       options={"ftol": 1e-12, "maxiter": 1000})
        assert res.success
        model = train_svm(X6, y6, KernelSpec(kind="rbf", gamma=gamma), C=C)
        assert abs(dual_objective(model) - (-res.fun)) < 1e-4


# -- 5: metrics ---------------------------------------------------------------

def pair_count_auc(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else (0.5 if p == q else 0.0)
    return total / (pos.size * neg.size)


def test_criterion_5_metrics():
    with criterion(5, "metrics"):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = int(rng.integers(2, 30))
            labels = np.zeros(n, dtype=int)
            labels[rng.permutation(n)[:int(rng.integers(1, n))]] = 1
            scores = np.round(rng.random(n), 1)  # coarse grid forces ties
            auc, points = roc_auc(scores, labels)
            assert auc == pair_count_auc(scores, labels)
            assert abs(trapezoid_area(points) - auc) < 1e-12

        ten = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
        assert aggregate_segment(ten, 0.3) == 0.55
        assert aggregate_segment(np.array([0.2, 0.4, 0.6, 0.8]), 0.3) == 0.5


# -- 6: CNN -------------------------------------------------------------------

def test_criterion_6_cnn():
    with criterion(6, "cnn"):
        rng = np.random.default_rng(6)
        params = init_cnn_params(rng)

        per_layer = {"conv1": 3 * 3 * 1 * 16 + 16,
                     "conv2": 3 * 3 * 16 * 16 + 16,
                     "conv3": 3 * 3 * 16 * 32 + 32,
                     "conv4": 3 * 3 * 32 * 64 + 64,
                     "fc1": 64 * 8 + 8,
                     "fc2": 8 * 2 + 2}
        assert sum(per_layer.values()) == 26154
        assert count_parameters(params) == 26154

        x = rng.standard_normal((2, 40, 40, 1)).astype(np.float32)
        probs, cache = cnn_forward(params, x)
        expected = {"a1": (2, 40, 40, 16), "a2": (2, 40, 40, 16),
                    "am1": (2, 20, 20, 16), "a3": (2, 20, 20, 32),
                    "am2": (2, 10, 10, 32), "a4": (2, 10, 10, 64),
                    "am3": (2, 5, 5, 64), "g": (2, 64), "f1": (2, 8),
                    "logits": (2, 2)}
        for key, shape in expected.items():
            assert cache[key].shape == shape, key
        assert probs.shape == (2, 2)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)

        # central differences on a float64 copy, a few entries per tensor
        p64 = params.astype(np.float64)
        x64 = rng.standard_normal((2, 40, 40, 1))
        labels = np.array([0, 1])

        def loss_value():
            _, c = cnn_forward(p64, x64)
            return bce_loss_and_grad(c["logits"], labels)[0]

        _, c0 = cnn_forward(p64, x64)
        _, dlogits = bce_loss_and_grad(c0["logits"], labels)
        grads = cnn_backward(p64, c0, dlogits)
        for name in p64.names():
            arr = getattr(p64, name)
            flat = rng.choice(arr.size, size=min(3, arr.size), replace=False)
            for idx in flat:
                coord = np.unravel_index(idx, arr.shape)
                keep, eps = arr[coord], 1e-6
                arr[coord] = keep + eps
                up = loss_value()
                arr[coord] = keep - eps
                down = loss_value()
                arr[coord] = keep
                fd = (up - down) / (2 * eps)
                an = grads[name][coord]
                rel = abs(fd - an) / max(abs(fd), abs(an), 1e-8)
                assert rel < 1e-4, f"{name}{coord}: fd={fd} analytic={an}"


def test_criterion_6_checkpoint_reproducibility(tmp_path):
    with criterion(6, "cnn checkpoint determinism"):
        rng = np.random.default_rng(66)
        n_seg = 8
        values = np.empty((n_seg, 40, 40))
        labels = np.arange(n_seg) % 2
        for i in range(n_seg):
            base = rng.standard_normal((40, 40)) * 0.5
            rows = slice(0, 20) if labels[i] == 0 else slice(20, 40)
            base[rows] += 3.0
            values[i] = base
        segments = np.arange(n_seg)
        cfg = TrainConfig(batch_size=4, max_epochs=2, seed=3)

        paths = []
        for run in range(2):
            params, history = cnn_train(values, labels, segments, cfg)
            path = tmp_path / f"run{run}.ckpt"
            save_checkpoint(path, params, {"epochs": len(history)})
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()


# -- 7: LOSO integrity --------------------------------------------------------

def test_criterion_7_loso_integrity():
    with criterion(7, "loso integrity"):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n_subj = int(rng.integers(2, 13))
            names = [f"s{i}" for i in range(n_subj)]
            subjects = np.array([names[int(rng.integers(0, n_subj))]
                                 for _ in range(n_subj * 4)])
            for i, name in enumerate(names):  # every subject appears
                subjects[i] = name
            rng.shuffle(subjects)

            folds = list(loso_folds(subjects))
            assert len(folds) == n_subj
            seen = []
            for fold in folds:
                train = set(subjects[fold.train_idx].tolist())
                test = set(subjects[fold.test_idx].tolist())
                assert len(test) == 1
                assert not train & test
                seen.extend(fold.test_idx.tolist())
            assert sorted(seen) == list(range(len(subjects)))


# -- 8: end-to-end synthetic benchmark ---------------------------------------

def test_criterion_8_end_to_end(tmp_path):
    with criterion(8, "end-to-end benchmark"):
        t0 = time.monotonic()
        train = TrainConfig(learning_rate=1e-4, batch_size=32,
                            max_epochs=10, seed=0)
        results = {}
        for sep in (1.0, 0.0):
            root = tmp_path / f"sep{int(sep * 10):02d}"
            generate_synthetic_corpus(
                SyntheticConfig(subjects_per_group=10,
                                segments_per_subject=8,
                                duration_sec=1.0, separation=sep, seed=0),
                root)
            report = run_pipeline(PipelineConfig(
                manifest=str(root / "manifest.csv"), branch="both",
                method="ls_l21", m=100, classifier="svm", kernel="rbf",
                C=4.0, gamma="scale", train=train, seed=0))
            results[sep] = report["branches"]

        assert results[1.0]["classical"]["accuracy"] >= 0.90
        assert results[1.0]["classical"]["auc"] >= 0.95
        assert results[1.0]["cnn"]["accuracy"] >= 0.85
        for branch in ("classical", "cnn"):
            acc = results[0.0][branch]["accuracy"]
            assert 0.35 <= acc <= 0.65, f"null {branch} accuracy {acc}"

        assert time.monotonic() - t0 < 600.0


# -- 9: determinism of the evaluate command -----------------------------------

def test_criterion_9_determinism(tmp_path):
    with criterion(9, "evaluate determinism"):
        root = tmp_path / "corpus"
        generate_synthetic_corpus(
            SyntheticConfig(subjects_per_group=4, segments_per_subject=2,
                            duration_sec=1.0, separation=1.0, seed=11),
            root)
        outs = []
        for run in range(2):
            out = tmp_path / f"run{run}"
            argv = ["evaluate", "--manifest", str(root / "manifest.csv"),
                    "--branch", "both", "--method", "fisher", "--m", "20",
                    "--epochs", "2", "--seed", "3", "--out", str(out)]
            assert cli_main(argv) == 0
            outs.append(out / "report.json")
        assert report_fingerprint(outs[0]) == report_fingerprint(outs[1])

        # fingerprint strips only the timestamp: the raw bytes agree
        # everywhere else
        a = json.loads(outs[0].read_text())
        b = json.loads(outs[1].read_text())
        a.pop("generated_at"), b.pop("generated_at")
        assert a == b
