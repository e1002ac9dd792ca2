"""Iterated Wiener denoising, first-order highpass and first-order LPC emphasis."""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import lfilter

from statsad.config import PipelineConfig
from statsad.noise_floor import track_minimum_per_bin, window_frames_for
from statsad.spectral import PowerSpectrogram, Spectrogram, istft, power, stft
from statsad.types import AudioClip


def wiener_gain(
    noise_psd: PowerSpectrogram | np.ndarray,
    obs_psd: PowerSpectrogram | np.ndarray,
    oversubtraction: float,
    gain_floor: float,
) -> np.ndarray:
    """``max(1 - oversubtraction * noise / obs, gain_floor)``; bins with zero observed power get ``gain_floor``."""
    noise = np.asarray(getattr(noise_psd, "frames", noise_psd), dtype=np.float64)
    obs = np.asarray(getattr(obs_psd, "frames", obs_psd), dtype=np.float64)
    if noise.shape != obs.shape:
        raise ValueError(f"shape mismatch: noise {noise.shape} vs observation {obs.shape}")
    if oversubtraction < 0 or not 0 < gain_floor < 1:
        raise ValueError("need oversubtraction >= 0 and 0 < gain_floor < 1")
    gain = np.full(obs.shape, gain_floor)
    live = obs > 0
    # a subnormal obs can overflow the ratio; the clip below handles -inf
    with np.errstate(over="ignore"):
        gain[live] = 1.0 - oversubtraction * noise[live] / obs[live]
    np.clip(gain, gain_floor, 1.0, out=gain)
    return gain


def denoise_pass(spec: Spectrogram, cfg: PipelineConfig = PipelineConfig()) -> Spectrogram:
    """One round of per-bin minimum tracking followed by Wiener gain application."""
    obs = power(spec)
    window = window_frames_for(cfg.min_stats_window, spec.frame_shift)
    noise = track_minimum_per_bin(obs, window, cfg.min_stats_smoothing)
    gain = wiener_gain(noise, obs, cfg.oversubtraction, cfg.gain_floor)
    return spec.with_frames(spec.frames * gain)


def denoise(clip: AudioClip, passes: int | None = None, cfg: PipelineConfig = PipelineConfig()) -> AudioClip:
    """Run ``passes`` sequential STFT -> denoise_pass -> ISTFT rounds.

    The noise floor is re-estimated on the already-denoised signal in every
    round.  Output length equals input length.
    """
    passes = cfg.denoise_passes if passes is None else passes
    if passes < 1:
        raise ValueError("passes must be >= 1")
    out = clip
    for _ in range(passes):
        spec = stft(out, cfg.fft_size, cfg.frame_length, cfg.frame_shift)
        out = istft(denoise_pass(spec, cfg))
    return out


def highpass_coefficients(cutoff: float, sample_rate: int) -> tuple[np.ndarray, np.ndarray]:
    # bilinear transform of s / (s + wc) with prewarping: exactly -3 dB at cutoff
    k = math.tan(math.pi * cutoff / sample_rate)
    b = np.array([1.0, -1.0]) / (1.0 + k)
    a = np.array([1.0, (k - 1.0) / (k + 1.0)])
    return b, a


def highpass(clip: AudioClip, cutoff: float = 150.0) -> AudioClip:
    """First-order recursive highpass with a zero at DC."""
    if not 0 < cutoff < clip.sample_rate / 2:
        raise ValueError(f"cutoff {cutoff} Hz outside (0, {clip.sample_rate / 2})")
    b, a = highpass_coefficients(cutoff, clip.sample_rate)
    return clip.with_samples(lfilter(b, a, clip.samples))


def lpc_coefficients(clip: AudioClip, frame: float = 0.032) -> np.ndarray:
    """First-order predictor ``r(1) / r(0)`` per non-overlapping frame, clamped to [-1, 1].

    The final partial frame gets its own coefficient; silent frames get 0.
    """
    if not frame > 0:
        raise ValueError("frame must be positive")
    n = max(1, int(round(frame * clip.sample_rate)))
    x = clip.samples
    blocks = -(-x.size // n)
    padded = np.zeros(blocks * n)
    padded[: x.size] = x
    frames = padded.reshape(blocks, n)
    r0 = np.einsum("ij,ij->i", frames, frames)
    r1 = np.einsum("ij,ij->i", frames[:, 1:], frames[:, :-1])
    a1 = np.zeros(blocks)
    live = r0 > 0
    a1[live] = r1[live] / r0[live]
    return np.clip(a1, -1.0, 1.0)


def lpc_emphasis(clip: AudioClip, frame: float = 0.032) -> AudioClip:
    """Replace the signal by its one-step first-order prediction ``y[n] = a1 * x[n-1]``.

    Strongly correlated (speech-like) content passes; white noise, whose
    predictor is near zero, is suppressed.
    """
    a1 = lpc_coefficients(clip, frame)
    n = max(1, int(round(frame * clip.sample_rate)))
    coeff = np.repeat(a1, n)[: clip.samples.size]
    prev = np.concatenate(([0.0], clip.samples[:-1]))
    return clip.with_samples(coeff * prev)
