"""Minimum-statistics floor tracking.

The input is first smoothed with a one-pole recursion
``p[t] = b * p[t-1] + (1 - b) * x[t]`` (``p[0] = x[0]``), then the floor at
``t`` is the minimum of ``p`` over the trailing window ``[t - w + 1, t]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from statsad.spectral import PowerSpectrogram

DEFAULT_WINDOW_SECONDS = 1.5
DEFAULT_SMOOTHING = 0.85


@dataclass(frozen=True, eq=False)
class FloorTrack:
    values: np.ndarray
    window_frames: int


def sliding_min(x: np.ndarray, window: int) -> np.ndarray:
    """Trailing-window minimum along axis 0 in O(T) using block prefix/suffix minima.

    ``out[t] = min(x[max(0, t - window + 1) : t + 1])``.
    """
    x = np.asarray(x, dtype=np.float64)
    if window < 1:
        raise ValueError("window must be >= 1")
    n = x.shape[0]
    if window == 1 or n == 0:
        return x.copy()
    window = min(window, n)
    tail = x.shape[1:]
    total = n + window - 1
    blocks = -(-total // window)
    padded = np.full((blocks * window,) + tail, np.inf)
    padded[window - 1 : window - 1 + n] = x
    shaped = padded.reshape((blocks, window) + tail)
    prefix = np.minimum.accumulate(shaped, axis=1).reshape(padded.shape)
    suffix = np.minimum.accumulate(shaped[:, ::-1], axis=1)[:, ::-1].reshape(padded.shape)
    # window over padded[i : i + window] spans at most two blocks
    return np.minimum(suffix[:n], prefix[window - 1 : window - 1 + n])


def recursive_smooth(x: np.ndarray, smoothing: float) -> np.ndarray:
    """One-pole smoothing along axis 0, initialized with the first sample."""
    x = np.asarray(x, dtype=np.float64)
    if smoothing == 0:
        return x.copy()
    zi = smoothing * x[:1]
    out, _ = lfilter([1.0 - smoothing], [1.0, -smoothing], x, axis=0, zi=zi)
    return out


def _check(seq: np.ndarray, window_frames: int, smoothing: float) -> None:
    if seq.shape[0] == 0:
        raise ValueError("cannot track the floor of an empty sequence")
    if window_frames < 1:
        raise ValueError("window_frames must be >= 1")
    if not 0 <= smoothing < 1:
        raise ValueError("smoothing must lie in [0, 1)")
    if np.any(seq < 0):
        raise ValueError("minimum tracking expects non-negative input")


def track_minimum(seq, window_frames: int, smoothing: float = DEFAULT_SMOOTHING) -> FloorTrack:
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 1:
        raise ValueError("track_minimum expects a one-dimensional sequence")
    _check(seq, window_frames, smoothing)
    return FloorTrack(sliding_min(recursive_smooth(seq, smoothing), window_frames), window_frames)


def track_minimum_per_bin(
    psd: PowerSpectrogram, window_frames: int, smoothing: float = DEFAULT_SMOOTHING
) -> PowerSpectrogram:
    """Floor of every frequency column of ``psd``, tracked independently."""
    frames = np.asarray(psd.frames, dtype=np.float64)
    _check(frames, window_frames, smoothing)
    return psd.with_frames(sliding_min(recursive_smooth(frames, smoothing), window_frames))


def window_frames_for(seconds: float, frame_shift: float) -> int:
    return max(1, int(round(seconds / frame_shift)))
