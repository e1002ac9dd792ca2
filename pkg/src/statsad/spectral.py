"""Framing, Hann-windowed STFT, weighted overlap-add inverse and power spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from statsad.types import AudioClip

DEFAULT_FFT_SIZE = 512
DEFAULT_FRAME_LENGTH = 0.050
DEFAULT_FRAME_SHIFT = 0.010


def hann(n: int) -> np.ndarray:
    """Periodic Hann window of length ``n``."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """T x F complex STFT with the geometry needed to invert it.

    ``n_samples`` is the original clip length; ``istft`` truncates to it.
    """

    frames: np.ndarray
    frame_shift: float
    frame_length: float
    fft_size: int
    sample_rate: int
    n_samples: int

    @property
    def hop(self) -> int:
        return int(round(self.frame_shift * self.sample_rate))

    @property
    def win_length(self) -> int:
        return int(round(self.frame_length * self.sample_rate))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_bins(self) -> int:
        return self.frames.shape[1]

    def with_frames(self, frames: np.ndarray) -> "Spectrogram":
        return Spectrogram(frames, self.frame_shift, self.frame_length, self.fft_size, self.sample_rate, self.n_samples)


@dataclass(frozen=True, eq=False)
class PowerSpectrogram:
    frames: np.ndarray
    frame_shift: float
    frame_length: float
    fft_size: int
    sample_rate: int

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def bin_frequencies(self) -> np.ndarray:
        return np.arange(self.frames.shape[1]) * self.sample_rate / self.fft_size

    def with_frames(self, frames: np.ndarray) -> "PowerSpectrogram":
        return PowerSpectrogram(frames, self.frame_shift, self.frame_length, self.fft_size, self.sample_rate)


def n_frames_for(n_samples: int, win: int, hop: int) -> int:
    return math.ceil((n_samples - win) / hop) + 1


def frame_signal(x: np.ndarray, win: int, hop: int) -> np.ndarray:
    """Split ``x`` into overlapping frames, zero-padding the tail so every sample is covered."""
    if x.size < win:
        raise ValueError(f"signal of {x.size} samples is shorter than one frame ({win})")
    n = n_frames_for(x.size, win, hop)
    padded = np.zeros((n - 1) * hop + win)
    padded[: x.size] = x
    return np.lib.stride_tricks.sliding_window_view(padded, win)[::hop]


def stft(
    clip: AudioClip,
    fft_size: int = DEFAULT_FFT_SIZE,
    frame_length: float = DEFAULT_FRAME_LENGTH,
    frame_shift: float = DEFAULT_FRAME_SHIFT,
    window: str = "hann",
) -> Spectrogram:
    if window != "hann":
        raise ValueError(f"unsupported window {window!r}")
    win = int(round(frame_length * clip.sample_rate))
    hop = int(round(frame_shift * clip.sample_rate))
    if not 0 < win <= fft_size:
        raise ValueError(f"frame of {win} samples does not fit fft_size {fft_size}")
    if not 0 < hop <= win:
        raise ValueError("frame_shift must be positive and not exceed frame_length")
    frames = frame_signal(clip.samples, win, hop) * hann(win)
    spec = np.fft.rfft(frames, n=fft_size, axis=1)
    return Spectrogram(spec, frame_shift, frame_length, fft_size, clip.sample_rate, clip.samples.size)


def overlap_add(frames: np.ndarray, hop: int) -> np.ndarray:
    """Sum rows of ``frames`` placed ``hop`` samples apart."""
    n, win = frames.shape
    blocks = -(-win // hop)
    padded = np.zeros((n, blocks * hop))
    padded[:, :win] = frames
    padded = padded.reshape(n, blocks, hop)
    out = np.zeros((n + blocks - 1, hop))
    for b in range(blocks):
        out[b : b + n] += padded[:, b, :]
    return out.reshape(-1)[: (n - 1) * hop + win]


def _window_sum(w2: np.ndarray, n: int, hop: int) -> np.ndarray:
    win = w2.size
    blocks = -(-win // hop)
    rows = np.zeros(blocks * hop)
    rows[:win] = w2
    rows = rows.reshape(blocks, hop)
    out = np.zeros((n + blocks - 1, hop))
    for b in range(blocks):
        out[b : b + n] += rows[b]
    return out.reshape(-1)[: (n - 1) * hop + win]


def istft(spec: Spectrogram) -> AudioClip:
    """Weighted overlap-add inverse (synthesis window = analysis window, normalized by the summed squared window)."""
    win, hop = spec.win_length, spec.hop
    if spec.frames.ndim != 2 or spec.n_bins != spec.fft_size // 2 + 1:
        raise ValueError("spectrogram bin count inconsistent with fft_size")
    if not 0 < hop <= win <= spec.fft_size:
        raise ValueError("spectrogram framing metadata inconsistent")
    expected = n_frames_for(spec.n_samples, win, hop)
    if spec.n_frames != expected:
        raise ValueError(f"{spec.n_frames} frames inconsistent with {spec.n_samples} samples (expected {expected})")
    w = hann(win)
    frames = np.fft.irfft(spec.frames, n=spec.fft_size, axis=1)[:, :win] * w
    num = overlap_add(frames, hop)
    den = _window_sum(w * w, spec.n_frames, hop)
    out = np.zeros_like(num)
    # sample 0 sees only w[0] = 0; leave such samples at zero
    ok = den > 1e-10
    out[ok] = num[ok] / den[ok]
    return AudioClip(out[: spec.n_samples], spec.sample_rate)


def power(spec: Spectrogram) -> PowerSpectrogram:
    z = spec.frames
    return PowerSpectrogram(z.real**2 + z.imag**2, spec.frame_shift, spec.frame_length, spec.fft_size, spec.sample_rate)
