"""Deterministic synthetic SAD corpus: AR(2) speech surrogates in controlled noise.

Each speech burst is white excitation through a two-pole resonator tuned to a
random frequency in 100-800 Hz, so it is strongly one-lag correlated like
voiced speech.  Bursts are scaled so that, over each burst, speech power sits
exactly ``snr_db`` above the local noise power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.signal import butter, lfilter, sosfilt

from statsad.audio_io import write_labels, write_wav
from statsad.types import NONSPEECH, SPEECH, AudioClip, LabelTrack, Segment

NOISE_PROFILES = ("white", "time-varying-white", "band-limited")
SPEECH_RMS = 0.1
PEAK_LIMIT = 0.9
EDGE_TAPER = 0.010


class InfeasibleCorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    duration: float = 60.0
    speech_ratio: float = 0.30
    snr_db: float = 5.0
    noise_profile: str = "time-varying-white"
    seed: int = 0
    sample_rate: int = 8000
    burst_min: float = 1.0
    burst_max: float = 1.5
    min_gap: float = 0.5

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise InfeasibleCorpusError("duration must be positive")
        if not 0 < self.speech_ratio < 1:
            raise InfeasibleCorpusError("speech_ratio must lie in (0, 1)")
        if self.noise_profile not in NOISE_PROFILES:
            raise ValueError(f"noise_profile must be one of {NOISE_PROFILES}")
        if not 0 < self.burst_min <= self.burst_max:
            raise ValueError("need 0 < burst_min <= burst_max")


@dataclass(frozen=True, eq=False)
class SynthComponents:
    speech: np.ndarray
    noise: np.ndarray
    labels: LabelTrack
    sample_rate: int

    @property
    def mixture(self) -> AudioClip:
        return AudioClip(self.speech + self.noise, self.sample_rate)


def _layout(spec: CorpusSpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Sample-exact (start, end) of every speech burst."""
    sr = spec.sample_rate
    n_total = int(round(spec.duration * sr))
    n_speech = int(round(spec.speech_ratio * n_total))
    mean_burst = 0.5 * (spec.burst_min + spec.burst_max) * sr
    n_bursts = max(1, int(round(n_speech / mean_burst)))
    raw = rng.uniform(spec.burst_min, spec.burst_max, n_bursts)
    lengths = np.floor(raw / raw.sum() * n_speech).astype(int)
    lengths[: n_speech - lengths.sum()] += 1

    n_gap = n_total - n_speech
    min_gap = int(round(spec.min_gap * sr))
    spare = n_gap - (n_bursts + 1) * min_gap
    if spare < 0 or np.any(lengths < 1):
        raise InfeasibleCorpusError(
            f"{n_bursts} bursts with {spec.min_gap} s gaps do not fit {spec.duration} s at ratio {spec.speech_ratio}"
        )
    share = rng.dirichlet(np.full(n_bursts + 1, 2.0))
    gaps = min_gap + np.floor(share * spare).astype(int)
    gaps[-1] += n_gap - gaps.sum()

    bursts = []
    pos = 0
    for gap, length in zip(gaps[:-1], lengths):
        pos += gap
        bursts.append((pos, pos + int(length)))
        pos += int(length)
    return bursts


def _burst(n: int, sr: int, rng: np.random.Generator) -> np.ndarray:
    f0 = rng.uniform(100.0, 800.0)
    radius = rng.uniform(0.95, 0.985)
    a = [1.0, -2.0 * radius * math.cos(2.0 * math.pi * f0 / sr), radius * radius]
    x = lfilter([1.0], a, rng.standard_normal(n + 256))[256:]
    taper = min(int(EDGE_TAPER * sr), n // 2)
    if taper > 0:
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(taper) / taper)
        x[:taper] *= ramp
        x[n - taper :] *= ramp[::-1]
    return x


def _noise(spec: CorpusSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    sr = spec.sample_rate
    w = rng.standard_normal(n)
    if spec.noise_profile == "band-limited":
        sos = butter(4, [300.0, min(3400.0, 0.45 * sr)], btype="bandpass", fs=sr, output="sos")
        w = sosfilt(sos, w)
        w /= w.std()
    elif spec.noise_profile == "time-varying-white":
        t = np.arange(n) / sr
        ph = rng.uniform(0, 2 * math.pi, 2)
        level_db = 6.0 * np.sin(2 * math.pi * t / 23.0 + ph[0]) + 3.0 * np.sin(2 * math.pi * t / 7.0 + ph[1])
        w *= 10.0 ** (level_db / 20.0)
    return w


def generate_components(spec: CorpusSpec) -> SynthComponents:
    rng = np.random.default_rng(spec.seed)
    sr = spec.sample_rate
    n_total = int(round(spec.duration * sr))
    bursts = _layout(spec, rng)
    noise_shape = _noise(spec, n_total, rng)
    noise_on = math.isfinite(spec.snr_db)
    # noise sized so the mixture stays speech-dominated in level
    noise_scale = SPEECH_RMS / 10.0 ** (spec.snr_db / 20.0) if noise_on else 0.0
    noise = noise_shape * noise_scale

    speech = np.zeros(n_total)
    for start, end in bursts:
        x = _burst(end - start, sr, rng)
        target = float(np.mean(noise[start:end] ** 2)) * 10.0 ** (spec.snr_db / 10.0) if noise_on else SPEECH_RMS**2
        speech[start:end] = x * math.sqrt(target / np.mean(x * x))

    peak = np.max(np.abs(speech + noise))
    if peak > PEAK_LIMIT:
        speech *= PEAK_LIMIT / peak
        noise *= PEAK_LIMIT / peak
    return SynthComponents(speech, noise, bursts_to_labels(bursts, n_total, sr), sr)


def bursts_to_labels(bursts: list[tuple[int, int]], n_total: int, sr: int) -> LabelTrack:
    segments = []
    pos = 0
    for start, end in bursts:
        if start > pos:
            segments.append(Segment(pos / sr, start / sr, NONSPEECH))
        segments.append(Segment(start / sr, end / sr, SPEECH))
        pos = end
    if pos < n_total:
        segments.append(Segment(pos / sr, n_total / sr, NONSPEECH))
    return LabelTrack(tuple(segments))


def generate(spec: CorpusSpec) -> tuple[AudioClip, LabelTrack]:
    comps = generate_components(spec)
    return comps.mixture, comps.labels


def segmental_snr(comps: SynthComponents) -> float:
    """Mean over speech segments of ``10 log10(speech power / noise power)`` in dB."""
    sr = comps.sample_rate
    values = []
    for seg in comps.labels.speech():
        a, b = int(round(seg.onset * sr)), int(round(seg.offset * sr))
        values.append(10 * math.log10(np.mean(comps.speech[a:b] ** 2) / np.mean(comps.noise[a:b] ** 2)))
    return float(np.mean(values))


def write_corpus(directory: str | Path, spec: CorpusSpec, count: int) -> list[Path]:
    """Write ``count`` recordings (``rec###.wav`` + ``rec###.lab``), seeds ``spec.seed + i``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        clip, labels = generate(replace(spec, seed=spec.seed + i))
        wav = out / f"rec{i:03d}.wav"
        write_wav(wav, clip)
        write_labels(labels, wav.with_suffix(".lab"))
        paths.append(wav)
    return paths
