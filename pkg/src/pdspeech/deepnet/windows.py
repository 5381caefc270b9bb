"""Sliding-window extraction of fixed-size network inputs."""

from dataclasses import dataclass

import numpy as np

WINDOW_WIDTH = 40
WINDOW_STRIDE = 10


@dataclass(frozen=True)
class SampleWindow:
    """One 40x40 patch of an MFCC matrix plus where it came from."""
    values: np.ndarray
    segment: int
    offset: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (WINDOW_WIDTH, WINDOW_WIDTH):
            raise ValueError(f"window must be 40x40, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("window contains non-finite values")
        object.__setattr__(self, "values", v)


def window_count(n_frames):
    if n_frames < WINDOW_WIDTH:
        return 0
    return (n_frames - WINDOW_WIDTH) // WINDOW_STRIDE + 1


def window_samples(mfcc, segment=0):
    """Slice a 40xN MFCC matrix into 40x40 windows, stride 10 frames.

    Segments shorter than one window yield an empty list and are left
    to the caller to skip.
    """
    m = np.asarray(mfcc, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != WINDOW_WIDTH:
        raise ValueError(f"expected a 40xN coefficient matrix, got {m.shape}")
    return [SampleWindow(m[:, off:off + WINDOW_WIDTH], segment, off)
            for off in range(0, m.shape[1] - WINDOW_WIDTH + 1, WINDOW_STRIDE)]


def stack_windows(windows):
    """Stack SampleWindows into (N, 40, 40) values plus segment ids."""
    if not windows:
        return (np.zeros((0, WINDOW_WIDTH, WINDOW_WIDTH)),
                np.zeros(0, dtype=np.int64))
    values = np.stack([w.values for w in windows])
    segments = np.array([w.segment for w in windows], dtype=np.int64)
    return values, segments
