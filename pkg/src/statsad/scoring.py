"""Frame-based confusion counts and the precision/recall/F1/DCF metrics.

DCF weighs the miss rate by 0.75 and the false-alarm rate by 0.25.  Empty
denominators never raise: a rate with nothing to measure is reported as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from statsad.types import DecisionStream

MISS_WEIGHT = 0.75
FALSE_ALARM_WEIGHT = 0.25


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    dcf: float

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "dcf": self.dcf}

    def key_values(self) -> str:
        """Machine-readable lines, values in percent with 4 decimals."""
        return "".join(f"{k}={100 * v:.4f}\n" for k, v in self.as_dict().items())

    def table(self) -> str:
        header = f"{'F1':>9} {'P':>9} {'R':>9} {'DCF':>9}"
        row = f"{100 * self.f1:9.4f} {100 * self.precision:9.4f} {100 * self.recall:9.4f} {100 * self.dcf:9.4f}"
        return f"{header}\n{row}\n"


def collar_mask(ref: DecisionStream, collar: float) -> np.ndarray:
    """True for frames scored, i.e. whose center is at least ``collar`` seconds from every reference boundary."""
    d = ref.decisions
    keep = np.ones(d.size, dtype=bool)
    if collar <= 0 or d.size < 2:
        return keep
    boundaries = (np.flatnonzero(d[1:] != d[:-1]) + 1) * ref.frame_shift
    if boundaries.size == 0:
        return keep
    centers = (np.arange(d.size) + 0.5) * ref.frame_shift
    pos = np.searchsorted(boundaries, centers)
    left = np.abs(centers - boundaries[np.maximum(pos - 1, 0)])
    right = np.abs(boundaries[np.minimum(pos, boundaries.size - 1)] - centers)
    # small slack so a center sitting exactly at `collar` is not lost to rounding
    return np.minimum(left, right) >= collar - 1e-9 * ref.frame_shift


def count(hyp: DecisionStream, ref: DecisionStream, collar: float = 0.0) -> ConfusionCounts:
    if len(hyp) != len(ref):
        raise ValueError(f"length mismatch: hypothesis {len(hyp)} vs reference {len(ref)} frames")
    if not np.isclose(hyp.frame_shift, ref.frame_shift):
        raise ValueError("hypothesis and reference frame shifts differ")
    if collar < 0:
        raise ValueError("collar must be non-negative")
    keep = collar_mask(ref, collar)
    h, r = hyp.decisions[keep], ref.decisions[keep]
    return ConfusionCounts(
        tp=int(np.sum(h & r)),
        fp=int(np.sum(h & ~r)),
        tn=int(np.sum(~h & ~r)),
        fn=int(np.sum(~h & r)),
    )


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def metrics(c: ConfusionCounts) -> Metrics:
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    dcf = MISS_WEIGHT * _ratio(c.fn, c.tp + c.fn) + FALSE_ALARM_WEIGHT * _ratio(c.fp, c.tn + c.fp)
    return Metrics(precision, recall, f1, dcf)
