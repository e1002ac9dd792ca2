"""WAV and label-file input/output, plus label <-> frame conversion.

Label files hold one segment per line::

    <onset seconds> <offset seconds> <speech|nonspeech>
"""

from __future__ import annotations

import struct
import warnings
from pathlib import Path

import numpy as np

from statsad.types import NONSPEECH, SPEECH, AudioClip, DecisionStream, LabelTrack, Segment

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class AudioFormatError(ValueError):
    """Malformed or truncated RIFF/WAVE data."""


class UnsupportedFormatError(AudioFormatError):
    """Well-formed WAV using an encoding this reader does not handle."""


class LabelParseError(ValueError):
    pass


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            # tolerate a truncated trailing data chunk, as many writers produce one
            if chunk_id != b"data":
                raise AudioFormatError(f"chunk {chunk_id!r} truncated")
        yield chunk_id, body
        pos += 8 + size + (size & 1)


def read_wav(path: str | Path) -> AudioClip:
    """Read a PCM (8/16/32-bit integer) or 32-bit float WAV file.

    Multi-channel files yield channel 0 and emit a warning.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for chunk_id, body in _iter_chunks(data):
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioFormatError(f"{path}: fmt chunk too short")
            fmt_tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", body)
            if fmt_tag == WAVE_FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise AudioFormatError(f"{path}: extensible fmt chunk too short")
                fmt_tag = struct.unpack_from("<H", body, 24)[0]
            fmt = (fmt_tag, channels, rate, block_align, bits)
        elif chunk_id == b"data" and payload is None:
            payload = body
    if fmt is None:
        raise AudioFormatError(f"{path}: missing fmt chunk")
    if payload is None:
        raise AudioFormatError(f"{path}: missing data chunk")

    fmt_tag, channels, rate, block_align, bits = fmt
    if channels < 1 or rate <= 0:
        raise AudioFormatError(f"{path}: invalid channel count or sample rate")
    if fmt_tag == WAVE_FORMAT_PCM and bits in (8, 16, 32):
        dtype = {8: np.uint8, 16: np.dtype("<i2"), 32: np.dtype("<i4")}[bits]
    elif fmt_tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedFormatError(f"{path}: unsupported encoding (format {fmt_tag:#x}, {bits} bits)")
    if block_align != channels * bits // 8:
        raise AudioFormatError(f"{path}: block_align {block_align} inconsistent with {channels}x{bits} bits")

    n_frames = len(payload) // block_align
    if n_frames == 0:
        raise AudioFormatError(f"{path}: empty data chunk")
    raw = np.frombuffer(payload[: n_frames * block_align], dtype=dtype).reshape(n_frames, channels)
    if channels > 1:
        warnings.warn(f"{path}: {channels} channels, using channel 0", stacklevel=2)
    x = raw[:, 0]

    if bits == 8:
        samples = (x.astype(np.float64) - 128.0) / 128.0
    elif fmt_tag == WAVE_FORMAT_IEEE_FLOAT:
        samples = x.astype(np.float64)
        if not np.all(np.isfinite(samples)):
            raise AudioFormatError(f"{path}: non-finite float samples")
        samples = np.clip(samples, -1.0, 1.0)
    else:
        samples = x.astype(np.float64) / float(2 ** (bits - 1))
    return AudioClip(samples, rate)


def write_wav(path: str | Path, clip: AudioClip, bits: int = 16) -> None:
    """Write a mono WAV file, 16-bit PCM (default) or 32-bit float (``bits=32``)."""
    x = np.clip(clip.samples, -1.0, 1.0)
    if bits == 16:
        payload = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2").tobytes()
        fmt_tag = WAVE_FORMAT_PCM
    elif bits == 32:
        payload = x.astype("<f4").tobytes()
        fmt_tag = WAVE_FORMAT_IEEE_FLOAT
    else:
        raise ValueError("bits must be 16 or 32")
    block_align = bits // 8
    fmt = struct.pack("<HHIIHH", fmt_tag, 1, clip.sample_rate, clip.sample_rate * block_align, block_align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(payload)) + payload
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def parse_labels(text: str) -> LabelTrack:
    segments = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 3:
            raise LabelParseError(f"line {lineno}: expected 'onset offset class', got {line!r}")
        try:
            onset, offset = float(parts[0]), float(parts[1])
        except ValueError:
            raise LabelParseError(f"line {lineno}: non-numeric time in {line!r}") from None
        label = parts[2].lower()
        if label not in (SPEECH, NONSPEECH):
            raise LabelParseError(f"line {lineno}: unknown class {parts[2]!r}")
        segments.append(Segment(onset, offset, label))
    segments.sort(key=lambda s: (s.onset, s.offset))
    try:
        return LabelTrack(tuple(segments))
    except ValueError as exc:
        raise LabelParseError(str(exc)) from None


def read_labels(path: str | Path) -> LabelTrack:
    """Read a label file; segments are sorted by onset and validated."""
    return parse_labels(Path(path).read_text())


def format_labels(track: LabelTrack) -> str:
    # repr gives the shortest string that round-trips the float exactly
    return "".join(f"{seg.onset!r} {seg.offset!r} {seg.label}\n" for seg in track)


def write_labels(track: LabelTrack, path: str | Path) -> None:
    Path(path).write_text(format_labels(track))


def labels_to_frames(track: LabelTrack, frame_shift: float, n_frames: int) -> DecisionStream:
    """Frame ``t`` is speech iff its center ``(t + 1/2) * frame_shift`` lies in a speech segment."""
    if not frame_shift > 0:
        raise ValueError("frame_shift must be positive")
    centers = (np.arange(n_frames) + 0.5) * frame_shift
    speech = np.zeros(n_frames, dtype=bool)
    for seg in track.speech():
        lo, hi = np.searchsorted(centers, [seg.onset, seg.offset], side="left")
        speech[lo:hi] = True
    return DecisionStream(speech, frame_shift)


def frames_to_labels(stream: DecisionStream, duration: float | None = None) -> LabelTrack:
    """Merge runs of equal frames into segments covering the whole stream.

    ``duration`` clips the final segment to the recording length.
    """
    d = stream.decisions
    if d.size == 0:
        return LabelTrack()
    change = np.flatnonzero(d[1:] != d[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [d.size]))
    end_time = d.size * stream.frame_shift if duration is None else duration
    segments = []
    for a, b in zip(starts, ends):
        onset = a * stream.frame_shift
        offset = min(b * stream.frame_shift, end_time)
        if onset < offset:
            segments.append(Segment(onset, offset, SPEECH if d[a] else NONSPEECH))
    return LabelTrack(tuple(segments))
