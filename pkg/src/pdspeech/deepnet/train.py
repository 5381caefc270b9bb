"""Adam training loop with validation-accuracy early stopping."""

from dataclasses import dataclass

import numpy as np

from .network import cnn_backward, cnn_forward, init_cnn_params
from . import ops

_EVAL_BATCH = 64


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 64
    max_epochs: int = 100
    val_fraction: float = 0.2
    early_stop_acc: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("batch_size and max_epochs must be >= 1")


class AdamState:
    def __init__(self, params):
        self.m = {n: np.zeros_like(getattr(params, n)) for n in params.names()}
        self.v = {n: np.zeros_like(getattr(params, n)) for n in params.names()}
        self.t = 0

    def step(self, params, grads, config):
        self.t += 1
        b1, b2 = config.beta1, config.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for n in params.names():
            g = grads[n]
            self.m[n] = b1 * self.m[n] + (1.0 - b1) * g
            self.v[n] = b2 * self.v[n] + (1.0 - b2) * g * g
            update = (config.learning_rate * (self.m[n] / bias1)
                      / (np.sqrt(self.v[n] / bias2) + config.eps))
            arr = getattr(params, n)
            arr -= update.astype(arr.dtype)


def _as_batch(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.float32)[..., None])


def split_by_segment(segments, val_fraction, rng):
    """Pick whole segments for validation so windows never straddle.

    Returns boolean masks (train, val) over the window axis.
    """
    segments = np.asarray(segments)
    unique = np.unique(segments)
    n_val = int(len(unique) * val_fraction)
    if n_val == 0:
        raise ValueError(
            f"validation split is empty ({len(unique)} segments at "
            f"fraction {val_fraction})")
    chosen = unique[rng.permutation(len(unique))[:n_val]]
    val = np.isin(segments, chosen)
    return ~val, val


def cnn_train(samples, labels, segments, config=TrainConfig()):
    """Train the classifier on windowed samples.

    samples: (N, 40, 40) windows; labels: 0/1 per window; segments:
    parent segment id per window, used to keep validation segments
    disjoint from training ones.  Returns (best params, history), the
    checkpoint being the earliest epoch with the highest validation
    accuracy.  Fully deterministic for a fixed config.
    """
    samples = np.asarray(samples, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    segments = np.asarray(segments)
    if samples.ndim != 3 or samples.shape[1:] != (40, 40):
        raise ValueError(f"samples must be (N, 40, 40), got {samples.shape}")
    if labels.shape != (len(samples),) or segments.shape != (len(samples),):
        raise ValueError("labels and segments must match samples")

    rng = np.random.default_rng(config.seed)
    train_mask, val_mask = split_by_segment(segments, config.val_fraction,
                                            rng)
    x_train, y_train = samples[train_mask], labels[train_mask]
    x_val, y_val = samples[val_mask], labels[val_mask]
    if np.unique(y_train).size < 2:
        raise ValueError("training portion must contain both classes")

    params = init_cnn_params(rng)
    adam = AdamState(params)
    best = params.copy()
    best_acc = -1.0
    history = []
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(x_train))
        loss_sum = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start:start + config.batch_size]
            xb = _as_batch(x_train[idx])
            _, cache = cnn_forward(params, xb, train=True, dropout_rng=rng)
            loss, dlogits = ops.bce_loss_and_grad(cache["logits"],
                                                  y_train[idx])
            grads = cnn_backward(params, cache, dlogits)
            adam.step(params, grads, config)
            loss_sum += loss * len(idx)
        val_acc = float(np.mean(
            (predict_sample_probs(params, x_val) > 0.5) == (y_val == 1)))
        history.append({"epoch": epoch,
                        "train_loss": loss_sum / len(x_train),
                        "val_accuracy": val_acc})
        if val_acc > best_acc:
            best_acc = val_acc
            best = params.copy()
        if val_acc >= config.early_stop_acc:
            break
    return best, history


def predict_sample_probs(params, samples):
    """Eval-mode disease probability for each 40x40 window."""
    samples = np.asarray(samples, dtype=np.float32)
    if samples.ndim != 3 or samples.shape[1:] != (40, 40):
        raise ValueError(f"samples must be (N, 40, 40), got {samples.shape}")
    out = np.empty(len(samples))
    for start in range(0, len(samples), _EVAL_BATCH):
        xb = _as_batch(samples[start:start + _EVAL_BATCH])
        probs, _ = cnn_forward(params, xb)
        out[start:start + _EVAL_BATCH] = probs[:, 1]
    return out
