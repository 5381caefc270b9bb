"""The 6-layer convolutional classifier and its checkpoint format.

Layer stack, all convs stride-1 same-padded, ReLU after every conv and
after the first fully connected layer:

    input 40x40x1
    conv 3x3x16   -> 40x40x16
    conv 3x3x16   -> 40x40x16
    maxpool 2x2   -> 20x20x16
    conv 3x3x32   -> 20x20x32
    maxpool 2x2   -> 10x10x32
    conv 3x3x64   -> 10x10x64
    maxpool 2x2   -> 5x5x64
    maxpool 5x5   -> 1x1x64
    fc 64x8, dropout p=0.5, fc 8x2, softmax
"""

import json
import struct
from dataclasses import dataclass, fields

import numpy as np

from . import ops

INPUT_SIDE = 40
DROPOUT_P = 0.5

_SHAPES = {
    "conv1_w": (3, 3, 1, 16), "conv1_b": (16,),
    "conv2_w": (3, 3, 16, 16), "conv2_b": (16,),
    "conv3_w": (3, 3, 16, 32), "conv3_b": (32,),
    "conv4_w": (3, 3, 32, 64), "conv4_b": (64,),
    "fc1_w": (64, 8), "fc1_b": (8,),
    "fc2_w": (8, 2), "fc2_b": (2,),
}

_MAGIC = b"PDCNET"
_CHECKPOINT_VERSION = 1


@dataclass
class CnnParams:
    conv1_w: np.ndarray
    conv1_b: np.ndarray
    conv2_w: np.ndarray
    conv2_b: np.ndarray
    conv3_w: np.ndarray
    conv3_b: np.ndarray
    conv4_w: np.ndarray
    conv4_b: np.ndarray
    fc1_w: np.ndarray
    fc1_b: np.ndarray
    fc2_w: np.ndarray
    fc2_b: np.ndarray

    def __post_init__(self):
        for name, shape in _SHAPES.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, "
                                 f"got {arr.shape}")

    def names(self):
        return [f.name for f in fields(self)]

    def copy(self):
        return CnnParams(**{n: getattr(self, n).copy() for n in self.names()})

    def astype(self, dtype):
        return CnnParams(**{n: getattr(self, n).astype(dtype)
                            for n in self.names()})


def count_parameters(params):
    return sum(getattr(params, n).size for n in params.names())


def init_cnn_params(rng, dtype=np.float32):
    """Kaiming-uniform fan-in weights, zero biases."""
    out = {}
    for name, shape in _SHAPES.items():
        if name.endswith("_b"):
            out[name] = np.zeros(shape, dtype=dtype)
            continue
        fan_in = int(np.prod(shape[:-1]))
        limit = np.sqrt(6.0 / fan_in)
        out[name] = rng.uniform(-limit, limit, shape).astype(dtype)
    return CnnParams(**out)


def cnn_forward(params, x, train=False, dropout_rng=None):
    """Run the network on an NHWC batch.

    Returns (probs, cache); probs are per-row class probabilities in
    the order (healthy, disease).  Dropout fires only in train mode,
    drawing its mask from dropout_rng.
    """
    x = np.asarray(x)
    if x.ndim != 4 or x.shape[1:] != (INPUT_SIDE, INPUT_SIDE, 1):
        raise ValueError(f"expected input (batch, 40, 40, 1), got {x.shape}")
    if train and dropout_rng is None:
        raise ValueError("train mode needs a dropout rng")
    p = params

    a1, col1 = ops.conv3x3(x, p.conv1_w, p.conv1_b)
    r1 = ops.relu(a1)
    a2, col2 = ops.conv3x3(r1, p.conv2_w, p.conv2_b)
    r2 = ops.relu(a2)
    p1, am1 = ops.maxpool2x2(r2)
    a3, col3 = ops.conv3x3(p1, p.conv3_w, p.conv3_b)
    r3 = ops.relu(a3)
    p2, am2 = ops.maxpool2x2(r3)
    a4, col4 = ops.conv3x3(p2, p.conv4_w, p.conv4_b)
    r4 = ops.relu(a4)
    p3, am3 = ops.maxpool2x2(r4)
    g, amg = ops.global_maxpool(p3)
    f1 = ops.fc(g, p.fc1_w, p.fc1_b)
    rf = ops.relu(f1)
    if train:
        mask = ops.dropout_mask(dropout_rng, rf.shape, DROPOUT_P, rf.dtype)
        d = rf * mask
    else:
        mask = None
        d = rf
    logits = ops.fc(d, p.fc2_w, p.fc2_b)
    cache = {
        "col1": col1, "a1": a1,
        "col2": col2, "a2": a2, "r2_shape": r2.shape, "am1": am1,
        "col3": col3, "a3": a3, "r3_shape": r3.shape, "am2": am2,
        "col4": col4, "a4": a4, "r4_shape": r4.shape, "am3": am3,
        "p3_shape": p3.shape, "amg": amg,
        "g": g, "f1": f1, "mask": mask, "d": d, "logits": logits,
    }
    return ops.softmax(logits), cache


def cnn_backward(params, cache, dlogits):
    """Gradients of the loss wrt every parameter, given dloss/dlogits.

    Returns a dict keyed like the CnnParams fields.
    """
    p = params
    grads = {}

    grads["fc2_w"], grads["fc2_b"], dd = ops.fc_grads(cache["d"], p.fc2_w,
                                                      dlogits)
    drf = dd if cache["mask"] is None else dd * cache["mask"]
    df1 = ops.relu_grad(drf, cache["f1"])
    grads["fc1_w"], grads["fc1_b"], dg = ops.fc_grads(cache["g"], p.fc1_w,
                                                      df1)
    dp3 = ops.global_maxpool_grad(dg, cache["amg"], cache["p3_shape"])
    dr4 = ops.maxpool2x2_grad(dp3, cache["am3"], cache["r4_shape"])
    da4 = ops.relu_grad(dr4, cache["a4"])
    grads["conv4_w"], grads["conv4_b"] = ops.conv3x3_param_grads(
        cache["col4"], da4)
    dp2 = ops.conv3x3_input_grad(da4, p.conv4_w)
    dr3 = ops.maxpool2x2_grad(dp2, cache["am2"], cache["r3_shape"])
    da3 = ops.relu_grad(dr3, cache["a3"])
    grads["conv3_w"], grads["conv3_b"] = ops.conv3x3_param_grads(
        cache["col3"], da3)
    dp1 = ops.conv3x3_input_grad(da3, p.conv3_w)
    dr2 = ops.maxpool2x2_grad(dp1, cache["am1"], cache["r2_shape"])
    da2 = ops.relu_grad(dr2, cache["a2"])
    grads["conv2_w"], grads["conv2_b"] = ops.conv3x3_param_grads(
        cache["col2"], da2)
    dr1 = ops.conv3x3_input_grad(da2, p.conv2_w)
    da1 = ops.relu_grad(dr1, cache["a1"])
    grads["conv1_w"], grads["conv1_b"] = ops.conv3x3_param_grads(
        cache["col1"], da1)
    return grads


def save_checkpoint(path, params, meta):
    """Write a versioned binary checkpoint.

    meta must be JSON-serializable (config echo, epoch, validation
    accuracy).  Output bytes are deterministic for identical inputs.
    """
    names = params.names()
    header = {
        "arrays": [{"name": n,
                    "shape": list(getattr(params, n).shape),
                    "dtype": str(getattr(params, n).dtype)}
                   for n in names],
        "meta": meta,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HI", _CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(getattr(params, n)).tobytes())


def load_checkpoint(path):
    """Read a checkpoint back. Returns (CnnParams, meta dict)."""
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        version, hlen = struct.unpack("<HI", fh.read(6))
        if version != _CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version "
                             f"{version}")
        header = json.loads(fh.read(hlen).decode())
        arrays = {}
        for spec in header["arrays"]:
            shape = tuple(spec["shape"])
            dt = np.dtype(spec["dtype"])
            raw = fh.read(int(np.prod(shape)) * dt.itemsize)
            arrays[spec["name"]] = np.frombuffer(raw, dtype=dt).reshape(shape)
    return CnnParams(**{k: v.copy() for k, v in arrays.items()}), \
        header["meta"]
