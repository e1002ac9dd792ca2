"""Unsupervised statistical speech activity detection."""

from statsad.config import PipelineConfig
from statsad.pipeline import DetectionResult, detect
from statsad.types import AudioClip, DecisionStream, LabelTrack, Segment

__all__ = ["AudioClip", "DecisionStream", "DetectionResult", "LabelTrack", "PipelineConfig", "Segment", "detect"]
__version__ = "0.1.0"
