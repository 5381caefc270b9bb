"""Array primitives for the convolutional network.

Every op comes in a compiled flavour (Cython kernels in ``_convcore``)
and a pure-numpy fallback.  The backend is picked once at import: the
compiled kernels when they built, numpy otherwise.  Set
``PDSPEECH_BACKEND=numpy`` or ``PDSPEECH_BACKEND=compiled`` to force a
choice (forcing ``compiled`` without the built extension is an error).

Layout is NHWC throughout; conv weights are (3, 3, c_in, c_out).
"""

import os

import numpy as np

try:
    from . import _convcore as _cc
except ImportError:
    _cc = None

_forced = os.environ.get("PDSPEECH_BACKEND")
if _forced is None:
    BACKEND = "compiled" if _cc is not None else "numpy"
elif _forced == "numpy":
    BACKEND = "numpy"
elif _forced == "compiled":
    if _cc is None:
        raise ImportError(
            "PDSPEECH_BACKEND=compiled but the _convcore extension is not built")
    BACKEND = "compiled"
else:
    raise ValueError(f"unknown PDSPEECH_BACKEND value {_forced!r}")


def _pad1(x):
    return np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))


def im2col3x3(x):
    """Gather 3x3 neighbourhoods of a same-padded NHWC batch.

    Returns a (B*H*W, 9*C) matrix whose columns are ordered tap-major
    (the 9 offsets row by row) and channel-minor, so a weight tensor
    (3, 3, C, O) multiplies it as a plain reshape to (9*C, O).
    """
    b, h, w, c = x.shape
    xp = _pad1(x)
    if BACKEND == "compiled":
        col = np.empty((b * h * w, 9 * c), dtype=x.dtype)
        _cc.gather3x3(np.ascontiguousarray(xp), col)
        return col
    win = np.lib.stride_tricks.sliding_window_view(xp, (3, 3), axis=(1, 2))
    return win.transpose(0, 1, 2, 4, 5, 3).reshape(b * h * w, 9 * c)


def conv3x3(x, w, bias):
    """Stride-1 same-padded 3x3 convolution. Returns (y, col cache)."""
    b, h, wd, cin = x.shape
    if w.shape[:3] != (3, 3, cin):
        raise ValueError(f"weight shape {w.shape} does not fit input "
                         f"with {cin} channels")
    col = im2col3x3(x)
    y = col @ w.reshape(9 * cin, -1) + bias
    return y.reshape(b, h, wd, -1), col


def conv3x3_param_grads(col, dout):
    """Weight/bias gradients from the cached im2col matrix."""
    b, h, w, cout = dout.shape
    dmat = dout.reshape(b * h * w, cout)
    dw = (col.T @ dmat).reshape(3, 3, -1, cout)
    return dw, dmat.sum(axis=0)


def conv3x3_input_grad(dout, w):
    """Input gradient: convolve dout with the spatially flipped,
    channel-transposed kernel."""
    wflip = np.ascontiguousarray(w[::-1, ::-1].transpose(0, 1, 3, 2))
    dx, _ = conv3x3(dout, wflip, np.zeros(wflip.shape[3], dtype=dout.dtype))
    return dx


def maxpool2x2(x):
    """Non-overlapping 2x2 max pool. Returns (y, argmax tap codes).

    Tap codes are 0..3 in (row, col) order within each window; ties go
    to the first tap.
    """
    b, h, w, c = x.shape
    if h % 2 or w % 2:
        raise ValueError("maxpool2x2 needs even spatial sides")
    if BACKEND == "compiled":
        y = np.empty((b, h // 2, w // 2, c), dtype=x.dtype)
        am = np.empty((b, h // 2, w // 2, c), dtype=np.uint8)
        _cc.maxpool2x2(np.ascontiguousarray(x), y, am)
        return y, am
    taps = x.reshape(b, h // 2, 2, w // 2, 2, c).transpose(0, 1, 3, 5, 2, 4)
    taps = taps.reshape(b, h // 2, w // 2, c, 4)
    am = taps.argmax(axis=4).astype(np.uint8)
    y = np.take_along_axis(taps, am[..., None].astype(np.intp), axis=4)
    return y[..., 0], am


def maxpool2x2_grad(dy, am, x_shape):
    """Route dy back to the argmax positions of the forward pass."""
    if BACKEND == "compiled":
        dx = np.empty(x_shape, dtype=dy.dtype)
        _cc.maxpool2x2_backward(np.ascontiguousarray(dy),
                                np.ascontiguousarray(am), dx)
        return dx
    b, h, w, c = x_shape
    taps = np.zeros((b, h // 2, w // 2, c, 4), dtype=dy.dtype)
    np.put_along_axis(taps, am[..., None].astype(np.intp), dy[..., None],
                      axis=4)
    return (taps.reshape(b, h // 2, w // 2, c, 2, 2)
                .transpose(0, 1, 4, 2, 5, 3).reshape(x_shape))


def global_maxpool(x):
    """Max over the whole spatial extent. Returns (y (B, C), argmax)."""
    b, h, w, c = x.shape
    flat = x.reshape(b, h * w, c)
    am = flat.argmax(axis=1)
    return np.take_along_axis(flat, am[:, None, :], axis=1)[:, 0, :], am


def global_maxpool_grad(dy, am, x_shape):
    b, h, w, c = x_shape
    flat = np.zeros((b, h * w, c), dtype=dy.dtype)
    np.put_along_axis(flat, am[:, None, :], dy[:, None, :], axis=1)
    return flat.reshape(x_shape)


def relu(x):
    return np.maximum(x, 0)


def relu_grad(dy, x):
    return np.where(x > 0, dy, 0)


def fc(x, w, bias):
    return x @ w + bias


def fc_grads(x, w, dy):
    return x.T @ dy, dy.sum(axis=0), dy @ w.T


def dropout_mask(rng, shape, p, dtype):
    """Inverted-scaling dropout mask: multiply by it in train mode."""
    mask = (rng.random(shape) >= p).astype(dtype)
    mask /= np.asarray(1.0 - p, dtype=dtype)
    return mask


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def bce_loss_and_grad(logits, labels):
    """Cross-entropy of the softmaxed pair against 0/1 labels.

    With two classes this equals binary cross-entropy on the positive
    probability.  Returns (mean loss, gradient wrt logits).
    """
    n = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1))
    loss = float(np.mean(lse - z[np.arange(n), labels]))
    grad = softmax(logits)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n
