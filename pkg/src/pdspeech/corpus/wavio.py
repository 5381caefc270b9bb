"""Minimal RIFF/WAVE codec.

Supports the formats the corpus actually uses: PCM 16- and 24-bit
integer and IEEE 32-bit float, mono or stereo.  Hand-rolled rather than
delegated so decode errors and byte layout stay under our control
(stdlib wave cannot read float or 24-bit files).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

_FMT_PCM = 1
_FMT_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


def decode_wav(path) -> tuple[np.ndarray, int]:
    """Read a WAV file into (mono float64 samples in [-1, 1], rate)."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos:pos + 4]
        size = struct.unpack_from("<I", raw, pos + 4)[0]
        body = raw[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if size < 16:
                raise ValueError(f"{path}: malformed fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise ValueError(f"{path}: truncated data chunk")
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or data is None:
        raise ValueError(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _, _, bits = fmt
    if tag == _FMT_EXTENSIBLE:
        # sub-format GUID starts with the ordinary format tag
        raise ValueError(f"{path}: extensible WAV not supported")
    if tag not in (_FMT_PCM, _FMT_FLOAT):
        raise ValueError(f"{path}: compressed codec (format tag {tag}) not supported")
    if channels not in (1, 2):
        raise ValueError(f"{path}: {channels} channels; only mono or stereo supported")
    if rate <= 0:
        raise ValueError(f"{path}: invalid sample rate {rate}")

    if tag == _FMT_PCM and bits == 16:
        x = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif tag == _FMT_PCM and bits == 24:
        if len(data) % 3:
            raise ValueError(f"{path}: truncated data chunk")
        b = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3)
        v = (b[:, 0].astype(np.int32)
             | (b[:, 1].astype(np.int32) << 8)
             | (b[:, 2].astype(np.int32) << 16))
        v = np.where(v & 0x800000, v - 0x1000000, v)
        x = v.astype(np.float64) / 8388608.0
    elif tag == _FMT_FLOAT and bits == 32:
        x = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise ValueError(f"{path}: unsupported sample format ({bits}-bit, tag {tag})")

    if channels == 2:
        if x.size % 2:
            raise ValueError(f"{path}: truncated data chunk")
        x = x.reshape(-1, 2).mean(axis=1)
    if x.size == 0:
        raise ValueError(f"{path}: empty data chunk")
    return np.clip(x, -1.0, 1.0), rate


def encode_wav(path, samples, rate: int, sample_format: str = "pcm16"):
    """Write mono samples in [-1, 1] as a WAV file."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("samples must be a non-empty 1-d sequence")
    if rate <= 0:
        raise ValueError("rate must be positive")

    if sample_format == "pcm16":
        q = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
        payload = q.tobytes()
        tag, bits = _FMT_PCM, 16
    elif sample_format == "pcm24":
        q = np.clip(np.rint(x * 8388608.0), -8388608, 8388607).astype(np.int32)
        u = np.where(q < 0, q + 0x1000000, q).astype(np.uint32)
        b = np.empty((u.size, 3), dtype=np.uint8)
        b[:, 0] = u & 0xFF
        b[:, 1] = (u >> 8) & 0xFF
        b[:, 2] = (u >> 16) & 0xFF
        payload = b.tobytes()
        tag, bits = _FMT_PCM, 24
    elif sample_format == "float32":
        payload = x.astype("<f4").tobytes()
        tag, bits = _FMT_FLOAT, 32
    else:
        raise ValueError(f"unknown sample format {sample_format!r}")

    block = bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, tag, 1, rate, rate * block, block, bits,
        b"data", len(payload),
    )
    Path(path).write_bytes(header + payload)
