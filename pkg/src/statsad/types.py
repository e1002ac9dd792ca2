"""Value types exchanged between pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

SPEECH = "speech"
NONSPEECH = "nonspeech"
CLASSES = (SPEECH, NONSPEECH)


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono float samples in [-1, 1] with their sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional")
        if samples.size == 0:
            raise ValueError("AudioClip must not be empty")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioClip samples must be finite")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "AudioClip":
        return AudioClip(samples, self.sample_rate)


class Segment(NamedTuple):
    onset: float
    offset: float
    label: str


@dataclass(frozen=True)
class LabelTrack:
    """Sorted, non-overlapping labelled time segments (seconds)."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        segs = tuple(Segment(float(on), float(off), str(lab)) for on, off, lab in self.segments)
        prev_off = -np.inf
        for seg in segs:
            if seg.label not in CLASSES:
                raise ValueError(f"unknown class {seg.label!r}")
            if not seg.onset < seg.offset:
                raise ValueError(f"segment onset must precede offset: {seg}")
            if seg.onset < prev_off:
                raise ValueError(f"segments overlap or are unsorted at {seg}")
            prev_off = seg.offset
        object.__setattr__(self, "segments", segs)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def speech(self) -> list[Segment]:
        return [s for s in self.segments if s.label == SPEECH]

    def speech_duration(self) -> float:
        return sum(s.offset - s.onset for s in self.speech())


@dataclass(frozen=True, eq=False)
class DecisionStream:
    """Per-frame speech (True) / non-speech (False) labels at a fixed shift."""

    decisions: np.ndarray
    frame_shift: float

    def __post_init__(self) -> None:
        d = np.asarray(self.decisions, dtype=bool)
        if d.ndim != 1:
            raise ValueError("decisions must be one-dimensional")
        if not self.frame_shift > 0:
            raise ValueError("frame_shift must be positive")
        object.__setattr__(self, "decisions", d)

    def __len__(self) -> int:
        return self.decisions.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecisionStream):
            return NotImplemented
        return self.frame_shift == other.frame_shift and np.array_equal(self.decisions, other.decisions)

    @property
    def speech_fraction(self) -> float:
        return float(self.decisions.mean()) if self.decisions.size else 0.0
