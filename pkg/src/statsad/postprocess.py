"""Decision smoothing: median filter, segment max-aggregation and majority voting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from statsad.types import DecisionStream


@dataclass(frozen=True, eq=False)
class ScoreStream:
    scores: np.ndarray
    frame_shift: float

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("scores must be a finite 1-D sequence")
        object.__setattr__(self, "scores", s)


@dataclass(frozen=True)
class SegmentationParams:
    """Segment length and shift in seconds plus the activity threshold."""

    length: float = 0.050
    shift: float = 0.010
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0 < self.shift <= self.length:
            raise ValueError("need 0 < shift <= length")

    def in_frames(self, frame_shift: float) -> tuple[int, int]:
        return max(1, int(round(self.length / frame_shift))), max(1, int(round(self.shift / frame_shift)))


def median_smooth(stream: DecisionStream, window_frames: int) -> DecisionStream:
    """Majority of each centered window; windows shrink at the edges.

    A shrunken edge window can have an even size; a tie there keeps the frame's own value.
    """
    if window_frames < 1 or window_frames % 2 == 0:
        raise ValueError("window_frames must be a positive odd count")
    d = stream.decisions
    n = d.size
    half = window_frames // 2
    csum = np.concatenate(([0], np.cumsum(d, dtype=np.int64)))
    t = np.arange(n)
    lo = np.maximum(t - half, 0)
    hi = np.minimum(t + half + 1, n)
    votes = csum[hi] - csum[lo]
    size = hi - lo
    out = np.where(2 * votes == size, d, 2 * votes > size)
    return DecisionStream(out, stream.frame_shift)


def segment_bounds(n_frames: int, length: int, shift: int) -> tuple[np.ndarray, np.ndarray]:
    """Start and (exclusive, clipped) end frame of every segment ``[i*shift, i*shift + length)``."""
    starts = np.arange(0, n_frames, shift)
    ends = np.minimum(starts + length, n_frames)
    return starts, ends


def segment_aggregate_frames(scores, length: int, shift: int, threshold: float) -> np.ndarray:
    """Frame-unit core of :func:`segment_aggregate`; returns a boolean array."""
    y = np.asarray(scores, dtype=np.float64)
    if y.size == 0:
        raise ValueError("score stream must not be empty")
    if length < 1 or not 0 < shift <= length:
        raise ValueError("need length >= 1 and 0 < shift <= length (frames)")
    starts, ends = segment_bounds(y.size, length, shift)
    active = y[ends - 1] > threshold
    # union of active segments via a difference array
    cover = np.zeros(y.size + 1, dtype=np.int64)
    np.add.at(cover, starts[active], 1)
    np.add.at(cover, ends[active], -1)
    return np.cumsum(cover[:-1]) > 0


def segment_aggregate(scores: ScoreStream, params: SegmentationParams = SegmentationParams()) -> DecisionStream:
    """Threshold each segment on the score of its last frame; a frame is speech if any active segment contains it."""
    length, shift = params.in_frames(scores.frame_shift)
    return DecisionStream(segment_aggregate_frames(scores.scores, length, shift, params.threshold), scores.frame_shift)


def majority_vote(streams: Sequence[DecisionStream], tie: str = "speech") -> DecisionStream:
    if not streams:
        raise ValueError("need at least one stream")
    if tie not in ("speech", "nonspeech"):
        raise ValueError("tie must be 'speech' or 'nonspeech'")
    first = streams[0]
    for s in streams[1:]:
        if len(s) != len(first) or s.frame_shift != first.frame_shift:
            raise ValueError("streams differ in length or frame shift")
    votes = np.sum([s.decisions for s in streams], axis=0, dtype=np.int64)
    doubled, n = 2 * votes, len(streams)
    out = (doubled > n) | ((doubled == n) & (tie == "speech"))
    return DecisionStream(out, first.frame_shift)


def rank_normalize(values, frame_shift: float) -> ScoreStream:
    """Map values to (0, 1] by their average rank; monotone and scale free."""
    v = np.asarray(values, dtype=np.float64)
    return ScoreStream(rankdata(v) / v.size, frame_shift)


def parse_postprocess(mode: str):
    """Parse ``none``, ``median:<frames>`` or ``segment:<L>,<S>,<alpha>`` (L and S in seconds).

    Returns ``None``, an int window or a :class:`SegmentationParams`.
    """
    mode = mode.strip()
    if mode in ("", "none"):
        return None
    kind, _, arg = mode.partition(":")
    try:
        if kind == "median":
            window = int(arg)
            if window < 1 or window % 2 == 0:
                raise ValueError
            return window
        if kind == "segment":
            length, shift, alpha = (float(p) for p in arg.split(","))
            return SegmentationParams(length, shift, alpha)
    except ValueError:
        pass
    raise ValueError(f"bad postprocess mode {mode!r}; use none, median:<odd frames> or segment:<L>,<S>,<alpha>")
