"""Pipeline configuration: one flat dataclass holding every tunable.

Configuration files use a flat ``key = value`` format whose keys are the
field names of :class:`PipelineConfig`.  Blank lines and ``#`` comments are
ignored.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Raised for unknown keys, unparsable values or out-of-range settings."""


@dataclass(frozen=True)
class PipelineConfig:
    # STFT front end
    fft_size: int = 512
    frame_length: float = 0.050
    frame_shift: float = 0.010

    # minimum statistics on power spectra
    min_stats_window: float = 1.5
    min_stats_smoothing: float = 0.85

    # Wiener denoising
    oversubtraction: float = 25.0
    gain_floor: float = 0.1
    denoise_passes: int = 3

    # time-domain filters
    highpass_cutoff: float = 150.0
    lpc_frame: float = 0.032

    # cumulative sub-band energy
    band_width: float = 1000.0
    energy_smoothing: float = 0.48
    csbe_floor_window: float = 1.5
    csbe_floor_smoothing: float = 0.85

    # adaptive threshold
    threshold_factor: float = 2.0
    noise_margin: float = 2.0
    speech_margin: float = 6.0

    # statistical models
    gmm_components: int = 2
    gmm_max_iter: int = 100
    gmm_tol: float = 1e-6
    hmm_self_loop: float = 0.9
    use_hmm: bool = True

    # post-processing: "none", "median:<frames>" or "segment:<L>,<S>,<alpha>"
    postprocess: str = "none"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.fft_size > 0 and self.fft_size % 2 == 0, "fft_size must be a positive even count"),
            (self.frame_length > 0, "frame_length must be positive"),
            (0 < self.frame_shift <= self.frame_length, "frame_shift must lie in (0, frame_length]"),
            (self.min_stats_window > 0, "min_stats_window must be positive"),
            (0 <= self.min_stats_smoothing < 1, "min_stats_smoothing must lie in [0, 1)"),
            (self.oversubtraction >= 0, "oversubtraction must be non-negative"),
            (0 < self.gain_floor < 1, "gain_floor must lie in (0, 1)"),
            (self.denoise_passes >= 1, "denoise_passes must be >= 1"),
            (self.highpass_cutoff > 0, "highpass_cutoff must be positive"),
            (self.lpc_frame > 0, "lpc_frame must be positive"),
            (self.band_width > 0, "band_width must be positive"),
            (self.energy_smoothing > 0, "energy_smoothing must be positive"),
            (self.csbe_floor_window > 0, "csbe_floor_window must be positive"),
            (0 <= self.csbe_floor_smoothing < 1, "csbe_floor_smoothing must lie in [0, 1)"),
            (self.threshold_factor > 0, "threshold_factor must be positive"),
            (0 < self.noise_margin < self.speech_margin, "need 0 < noise_margin < speech_margin"),
            (self.gmm_components >= 1, "gmm_components must be >= 1"),
            (self.gmm_max_iter >= 1, "gmm_max_iter must be >= 1"),
            (self.gmm_tol >= 0, "gmm_tol must be non-negative"),
            (0 < self.hmm_self_loop <= 1, "hmm_self_loop must lie in (0, 1]"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        # parse eagerly so a bad mode string fails at construction
        from statsad.postprocess import parse_postprocess

        try:
            parse_postprocess(self.postprocess)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_format_value(getattr(self, f.name))}\n" for f in fields(self))


def field_types() -> dict[str, type]:
    return {f.name: type(f.default) for f in fields(PipelineConfig)}


def coerce_value(key: str, raw: str) -> Any:
    """Convert the string ``raw`` to the type of config field ``key``."""
    types = field_types()
    if key not in types:
        raise ConfigError(f"unknown config key {key!r}")
    kind = types[key]
    raw = raw.strip()
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {kind.__name__}") from None


def parse_config_text(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[key] = coerce_value(key, raw)
    return (base or PipelineConfig()).replace(**values)


def load_config(path: str | Path, base: PipelineConfig | None = None) -> PipelineConfig:
    return parse_config_text(Path(path).read_text(), base)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
