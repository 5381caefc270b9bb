"""Time-frequency front end: power STFT, mel filterbank, MFCCs, deltas.

The representation is a 40 x n matrix per segment: 128 mel filters
limited to 2000 Hz, 128 cepstral coefficients, of which the 5th through
44th (one-indexed) are kept.  Frames are 2048 samples with 75% overlap
and no padding, so a 1 s segment at 48 kHz gives 90 frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft


@dataclass(frozen=True)
class DspConfig:
    window_len: int = 2048
    hop: int = 512
    n_mels: int = 128
    n_mfcc: int = 128
    fmin: float = 0.0
    fmax: float = 2000.0
    coeff_lo: int = 5   # one-indexed, inclusive
    coeff_hi: int = 44
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.hop * 4 != self.window_len:
            raise ValueError("hop must be window_len/4 (75% overlap)")
        if self.coeff_hi - self.coeff_lo + 1 != 40:
            raise ValueError("coefficient range must span exactly 40 coefficients")
        if not 1 <= self.coeff_lo <= self.coeff_hi <= self.n_mfcc:
            raise ValueError("coefficient range outside [1, n_mfcc]")
        if self.n_mfcc > self.n_mels:
            raise ValueError("cannot take more cepstral coefficients than mel bands")
        if not 0 <= self.fmin < self.fmax:
            raise ValueError("need 0 <= fmin < fmax")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


DEFAULT_CONFIG = DspConfig()


def hann_periodic(n: int) -> np.ndarray:
    """Periodic Hann window (DFT-even form)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def frame_count(n_samples: int, config: DspConfig = DEFAULT_CONFIG) -> int:
    if n_samples < config.window_len:
        return 0
    return (n_samples - config.window_len) // config.hop + 1


def stft_power(samples, config: DspConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Squared-magnitude STFT, shape (window_len/2 + 1, n_frames).

    Frame t covers samples [t*hop, t*hop + window_len); the partial tail
    is dropped.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("samples must be 1-d")
    n = frame_count(x.size, config)
    if n < 1:
        raise ValueError(
            f"signal of {x.size} samples is shorter than one "
            f"{config.window_len}-sample window")
    frames = np.lib.stride_tricks.sliding_window_view(
        x, config.window_len)[::config.hop][:n]
    spec = np.fft.rfft(frames * hann_periodic(config.window_len), axis=1)
    return (spec.real ** 2 + spec.imag ** 2).T


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, config: DspConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, window_len/2 + 1).

    Corner frequencies equally spaced on the mel scale over
    [fmin, fmax]; each triangle is scaled by 2/(f_hi - f_lo) so filter
    area is constant.
    """
    if config.fmax > sample_rate / 2:
        raise ValueError(
            f"fmax {config.fmax} Hz above Nyquist {sample_rate / 2} Hz")
    n_bins = config.window_len // 2 + 1
    bin_hz = np.arange(n_bins) * (sample_rate / config.window_len)
    corners = mel_to_hz(np.linspace(hz_to_mel(config.fmin),
                                    hz_to_mel(config.fmax),
                                    config.n_mels + 2))
    fb = np.zeros((config.n_mels, n_bins))
    for i in range(config.n_mels):
        lo, mid, hi = corners[i], corners[i + 1], corners[i + 2]
        up = (bin_hz - lo) / (mid - lo)
        down = (hi - bin_hz) / (hi - mid)
        fb[i] = np.maximum(0.0, np.minimum(up, down)) * (2.0 / (hi - lo))
    return fb


def mfcc(samples, sample_rate: int,
         config: DspConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Selected MFCC matrix, shape (40, n_frames).

    Mel energies are floored before the log so silence stays finite;
    the orthonormal DCT-II runs along the mel axis and rows
    coeff_lo..coeff_hi (one-indexed) are retained.
    """
    power = stft_power(samples, config)
    mel_energy = mel_filterbank(sample_rate, config) @ power
    logmel = np.log(np.maximum(mel_energy, config.log_floor))
    cep = scipy.fft.dct(logmel, type=2, norm="ortho", axis=0)[:config.n_mfcc]
    return np.ascontiguousarray(cep[config.coeff_lo - 1:config.coeff_hi])


_DELTA_HALF = 4
_DELTA_NORM = 2.0 * sum(k * k for k in range(1, _DELTA_HALF + 1))  # = 60


def delta(matrix, order: int = 1) -> np.ndarray:
    """Local linear-regression derivative along time (9-frame window).

    Edge frames are handled by replicating the first and last columns.
    order=2 applies the operator twice.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] < 1:
        raise ValueError("matrix must be 2-d with at least one column")
    for _ in range(order):
        n = m.shape[1]
        pad = np.pad(m, ((0, 0), (_DELTA_HALF, _DELTA_HALF)), mode="edge")
        num = np.zeros_like(m)
        for k in range(1, _DELTA_HALF + 1):
            num += k * (pad[:, _DELTA_HALF + k:_DELTA_HALF + k + n]
                        - pad[:, _DELTA_HALF - k:_DELTA_HALF - k + n])
        m = num / _DELTA_NORM
    return m
