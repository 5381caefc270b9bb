"""Time the compiled convolution kernels against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--batch 64] [--repeat 20]

The workload mirrors the training loop: batches of 40x40 single-channel
windows through im2col, pooling, a full forward pass and a full
forward-plus-backward step.  Each timing is the median of --repeat runs.
"""

import argparse
import statistics
import time

import numpy as np

from pdspeech.deepnet import (cnn_backward, cnn_forward, init_cnn_params,
                              ops)
from pdspeech.deepnet.ops import bce_loss_and_grad


def _time(fn, repeat):
    samples = []
    fn()  # warm up caches and allocators
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _cases(batch, rng):
    x1 = rng.standard_normal((batch, 40, 40, 1)).astype(np.float32)
    x16 = rng.standard_normal((batch, 40, 40, 16)).astype(np.float32)
    params = init_cnn_params(rng)
    labels = rng.integers(0, 2, size=batch)
    drop = np.random.default_rng(0)

    def full_forward():
        cnn_forward(params, x1)

    def train_step():
        probs, cache = cnn_forward(params, x1, train=True, dropout_rng=drop)
        _, dlogits = bce_loss_and_grad(cache["logits"], labels)
        cnn_backward(params, cache, dlogits)

    return [
        ("im2col 40x40x16", lambda: ops.im2col3x3(x16)),
        ("maxpool 40x40x16", lambda: ops.maxpool2x2(x16)),
        ("forward batch", full_forward),
        ("forward+backward", train_step),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    backends = ["numpy"]
    if ops._cc is not None:
        backends.append("compiled")
    else:
        print("note: compiled extension not built; timing numpy only")

    rng = np.random.default_rng(7)
    cases = _cases(args.batch, rng)

    results = {}
    for backend in backends:
        ops.BACKEND = backend
        for name, fn in cases:
            results[(backend, name)] = _time(fn, args.repeat)

    print(f"batch={args.batch} repeat={args.repeat} (median seconds)")
    header = f"{'kernel':<20} {'numpy':>10}"
    if "compiled" in backends:
        header += f" {'compiled':>10} {'speedup':>8}"
    print(header)
    for name, _ in cases:
        t_np = results[("numpy", name)]
        line = f"{name:<20} {t_np:>10.5f}"
        if "compiled" in backends:
            t_cc = results[("compiled", name)]
            line += f" {t_cc:>10.5f} {t_np / t_cc:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
