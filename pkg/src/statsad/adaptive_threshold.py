"""Initial speech hypothesis and GMM training partitions from a CSBE track."""

from __future__ import annotations

import numpy as np

from statsad.csbe import CsbeTrack
from statsad.types import DecisionStream


class DegeneratePartitionError(ValueError):
    """One of the noise/speech training partitions came out empty."""


def initial_decision(track: CsbeTrack, factor: float = 2.0) -> DecisionStream:
    """Frame is speech iff its CSBE exceeds ``factor * (floor + average floor)``."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    threshold = factor * (track.floor.values + track.average_floor)
    return DecisionStream(track.values > threshold, track.frame_shift)


def partition_for_training(
    track: CsbeTrack, noise_margin: float = 2.0, speech_margin: float = 6.0
) -> tuple[np.ndarray, np.ndarray]:
    """Split log-CSBE values into noise (< noise_margin * A) and speech (> speech_margin * A) samples.

    ``A`` is the average floor.  Values between the two thresholds are left out.
    """
    if not 0 < noise_margin < speech_margin:
        raise ValueError("need 0 < noise_margin < speech_margin")
    noise = track.log_values[track.values < noise_margin * track.average_floor]
    speech = track.log_values[track.values > speech_margin * track.average_floor]
    if noise.size == 0 or speech.size == 0:
        empty = "noise" if noise.size == 0 else "speech"
        raise DegeneratePartitionError(f"{empty} partition is empty")
    return noise, speech
