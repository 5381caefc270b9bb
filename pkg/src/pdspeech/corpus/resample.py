"""Sample-rate conversion for decoded segments."""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import resample_poly


def resample(samples, source_rate: int, target_rate: int) -> np.ndarray:
    """Band-limited polyphase resampling from source_rate to target_rate."""
    if source_rate <= 0 or target_rate <= 0:
        raise ValueError("sample rates must be positive")
    x = np.asarray(samples, dtype=np.float64)
    if source_rate == target_rate:
        return x.copy()
    g = math.gcd(source_rate, target_rate)
    return resample_poly(x, target_rate // g, source_rate // g)
