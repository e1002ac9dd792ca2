"""Cumulative sub-band energy (CSBE) and its tracked floor.

Per frame, power is summed in fixed-width sub-bands, each band is smoothed
over time, and the bands are combined with weight ``1/s`` for the ``s``-th
band (1-based), so the lowest band counts most.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from statsad.config import PipelineConfig
from statsad.noise_floor import FloorTrack, track_minimum, window_frames_for
from statsad.spectral import PowerSpectrogram, power, stft
from statsad.types import AudioClip

LOG_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class CsbeTrack:
    values: np.ndarray
    log_values: np.ndarray
    floor: FloorTrack
    average_floor: float
    frame_shift: float

    def __len__(self) -> int:
        return self.values.size

    def to_csv(self) -> str:
        rows = ["frame_index,value,floor\n"]
        rows += [f"{i},{v!r},{f!r}\n" for i, (v, f) in enumerate(zip(self.values.tolist(), self.floor.values.tolist()))]
        return "".join(rows)


def band_count(sample_rate: int, band_width: float) -> int:
    return max(1, math.ceil((sample_rate / 2) / band_width))


def band_membership(psd: PowerSpectrogram, band_width: float) -> np.ndarray:
    """F x S 0/1 matrix assigning each bin to the band containing its center frequency.

    The Nyquist bin sits on the upper edge of the last band and is folded into it.
    """
    if not band_width > 0:
        raise ValueError("band_width must be positive")
    freqs = psd.bin_frequencies()
    n_bands = band_count(psd.sample_rate, band_width)
    index = np.minimum((freqs // band_width).astype(int), n_bands - 1)
    member = np.zeros((freqs.size, n_bands))
    member[np.arange(freqs.size), index] = 1.0
    return member


def subband_energies(psd: PowerSpectrogram, band_width: float = 1000.0) -> np.ndarray:
    """T x S matrix of power summed per sub-band."""
    return np.asarray(psd.frames) @ band_membership(psd, band_width)


def smooth_energies(energies: np.ndarray, window_frames: int) -> np.ndarray:
    """Centered moving average along time; windows shrink at the edges.

    ``window_frames`` should be odd; an even value is rounded up.
    """
    e = np.asarray(energies, dtype=np.float64)
    if window_frames < 1:
        raise ValueError("window_frames must be >= 1")
    half = window_frames // 2
    n = e.shape[0]
    csum = np.concatenate((np.zeros((1,) + e.shape[1:]), np.cumsum(e, axis=0)))
    t = np.arange(n)
    lo = np.maximum(t - half, 0)
    hi = np.minimum(t + half + 1, n)
    count = (hi - lo).reshape((n,) + (1,) * (e.ndim - 1))
    return (csum[hi] - csum[lo]) / count


def smoothing_frames(seconds: float, frame_shift: float) -> int:
    n = max(1, int(round(seconds / frame_shift)))
    return n if n % 2 else n + 1


def accumulate_csbe(smoothed: np.ndarray) -> np.ndarray:
    """``CSBE(t) = sum_s E(t, s) / s`` over 1-based band index ``s``."""
    e = np.asarray(smoothed, dtype=np.float64)
    if e.ndim != 2 or e.shape[1] < 1:
        raise ValueError("expected a T x S energy matrix with S >= 1")
    return e @ (1.0 / np.arange(1, e.shape[1] + 1))


def finalize_track(values, window_frames: int, smoothing: float, frame_shift: float) -> CsbeTrack:
    values = np.asarray(values, dtype=np.float64)
    floor = track_minimum(values, window_frames, smoothing)
    return CsbeTrack(
        values=values,
        log_values=np.log(np.maximum(values, LOG_EPS)),
        floor=floor,
        average_floor=float(floor.values.mean()),
        frame_shift=frame_shift,
    )


def analysis_power(clip: AudioClip, cfg: PipelineConfig = PipelineConfig()) -> PowerSpectrogram:
    """Power spectrogram whose frame ``t`` is centered on ``(t + 1/2) * frame_shift``.

    The clip is padded so there is exactly one frame per ``frame_shift`` of audio,
    matching the frame grid used for labels and scoring.
    """
    win = int(round(cfg.frame_length * clip.sample_rate))
    hop = int(round(cfg.frame_shift * clip.sample_rate))
    lead = (win - hop) // 2
    n_out = -(-clip.samples.size // hop)
    padded = np.concatenate((np.zeros(lead), clip.samples, np.zeros(win)))
    psd = power(stft(clip.with_samples(padded), cfg.fft_size, cfg.frame_length, cfg.frame_shift))
    return psd.with_frames(psd.frames[:n_out])


def compute_csbe(clip: AudioClip, cfg: PipelineConfig = PipelineConfig()) -> CsbeTrack:
    """CSBE track of an (already enhanced) clip."""
    psd = analysis_power(clip, cfg)
    bands = subband_energies(psd, cfg.band_width)
    smoothed = smooth_energies(bands, smoothing_frames(cfg.energy_smoothing, cfg.frame_shift))
    window = window_frames_for(cfg.csbe_floor_window, cfg.frame_shift)
    return finalize_track(accumulate_csbe(smoothed), window, cfg.csbe_floor_smoothing, cfg.frame_shift)
