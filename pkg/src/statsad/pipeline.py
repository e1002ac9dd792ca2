"""End-to-end statistical SAD: denoise, filter, CSBE, threshold, GMM/HMM decoding."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from statsad.adaptive_threshold import DegeneratePartitionError, initial_decision, partition_for_training
from statsad.config import PipelineConfig
from statsad.csbe import CsbeTrack, compute_csbe
from statsad.enhance import denoise, highpass, lpc_emphasis
from statsad.postprocess import SegmentationParams, median_smooth, parse_postprocess, rank_normalize, segment_aggregate
from statsad.stat_models import SadHmm, build_sad_hmm, gmm_fit_em, viterbi
from statsad.types import AudioClip, DecisionStream

log = logging.getLogger(__name__)


@dataclass(eq=False)
class DetectionResult:
    decisions: DecisionStream
    initial: DecisionStream
    track: CsbeTrack
    hmm: SadHmm | None = None
    fallback: str | None = None
    timings: dict[str, float] = field(default_factory=dict)
    audio_duration: float = 0.0

    @property
    def elapsed(self) -> float:
        return sum(self.timings.values())

    @property
    def realtime_factor(self) -> float:
        return self.elapsed / self.audio_duration if self.audio_duration else float("nan")


def enhance(clip: AudioClip, cfg: PipelineConfig) -> AudioClip:
    out = denoise(clip, cfg.denoise_passes, cfg)
    out = highpass(out, cfg.highpass_cutoff)
    return lpc_emphasis(out, cfg.lpc_frame)


def fit_models(track: CsbeTrack, cfg: PipelineConfig) -> SadHmm:
    """Train the class GMMs on the threshold partitions and assemble the HMM.

    Raises:
        DegeneratePartitionError: a partition is empty or too small to fit.
    """
    noise, speech = partition_for_training(track, cfg.noise_margin, cfg.speech_margin)
    k = cfg.gmm_components
    small = min(noise.size, speech.size)
    if small < 2:
        raise DegeneratePartitionError(f"partition of {small} samples cannot be modelled")
    # shrink the mixture for tiny partitions rather than fail
    k_noise, k_speech = min(k, noise.size // 2), min(k, speech.size // 2)
    noise_gmm = gmm_fit_em(noise, k_noise, cfg.gmm_max_iter, cfg.gmm_tol)
    speech_gmm = gmm_fit_em(speech, k_speech, cfg.gmm_max_iter, cfg.gmm_tol)
    return build_sad_hmm(noise_gmm, speech_gmm, cfg.hmm_self_loop)


def detect(clip: AudioClip, cfg: PipelineConfig = PipelineConfig()) -> DetectionResult:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    enhanced = enhance(clip, cfg)
    t1 = time.perf_counter()
    timings["enhance"] = t1 - t0

    track = compute_csbe(enhanced, cfg)
    initial = initial_decision(track, cfg.threshold_factor)
    t2 = time.perf_counter()
    timings["csbe"] = t2 - t1

    hmm = None
    fallback = None
    decisions = initial
    if cfg.use_hmm:
        try:
            hmm = fit_models(track, cfg)
            decisions = viterbi(hmm, track.log_values, track.frame_shift)
        except DegeneratePartitionError as exc:
            fallback = str(exc)
            log.warning("falling back to the initial threshold decision: %s", exc)
    t3 = time.perf_counter()
    timings["decode"] = t3 - t2

    mode = parse_postprocess(cfg.postprocess)
    if isinstance(mode, int):
        decisions = median_smooth(decisions, mode)
    elif isinstance(mode, SegmentationParams):
        decisions = segment_aggregate(rank_normalize(track.log_values, track.frame_shift), mode)
    timings["postprocess"] = time.perf_counter() - t3

    return DetectionResult(decisions, initial, track, hmm, fallback, timings, clip.duration)
