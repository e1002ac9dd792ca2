"""Command-line front end: ``statsad {detect,score,sweep,synth,dump}``.

Every :class:`PipelineConfig` field is exposed as ``--<field>`` (underscores
or dashes).  Exit codes: 0 success, 1 input error, 2 a recording fell back
to the threshold-only decision.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path
from typing import Any, Sequence

from statsad.audio_io import (
    AudioFormatError,
    LabelParseError,
    frames_to_labels,
    labels_to_frames,
    read_labels,
    read_wav,
    write_labels,
)
from statsad.config import ConfigError, PipelineConfig, coerce_value, field_types, load_config
from statsad.pipeline import DetectionResult, detect
from statsad.scoring import ConfusionCounts, Metrics, count, metrics
from statsad.synth import NOISE_PROFILES, CorpusSpec, write_corpus
from statsad.types import LabelTrack

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FALLBACK = 2

log = logging.getLogger("statsad")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline configuration")
    group.add_argument("--config", type=Path, help="key = value file; flags below override it")
    for f in fields(PipelineConfig):
        flags = [f"--{f.name}"]
        if "_" in f.name:
            flags.append(f"--{f.name.replace('_', '-')}")
        group.add_argument(*flags, dest=f"cfg_{f.name}", metavar=type(f.default).__name__.upper(), default=None,
                           help=f"default {f.default}")


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {}
    for name in field_types():
        raw = getattr(args, f"cfg_{name}", None)
        if raw is not None:
            overrides[name] = coerce_value(name, raw)
    return cfg.replace(**overrides) if overrides else cfg


def _n_frames(tracks: Sequence[LabelTrack], frame_shift: float) -> int:
    end = max((seg.offset for t in tracks for seg in t), default=0.0)
    return math.ceil(end / frame_shift - 1e-9)


def score_tracks(hyp: LabelTrack, ref: LabelTrack, frame_shift: float = 0.01, collar: float = 0.0) -> tuple[ConfusionCounts, Metrics]:
    n = _n_frames([hyp, ref], frame_shift)
    c = count(labels_to_frames(hyp, frame_shift, n), labels_to_frames(ref, frame_shift, n), collar)
    return c, metrics(c)


def _detect_one(job: tuple[str, PipelineConfig]) -> tuple[str, DetectionResult, float]:
    path, cfg = job
    clip = read_wav(path)
    return path, detect(clip, cfg), clip.duration


def _map(fn, jobs: list, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_detect(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    inputs = [str(p) for p in args.audio]
    if len(inputs) > 1 and args.output and not args.output.is_dir():
        raise ConfigError("with several inputs, --output must be an existing directory")
    status = EXIT_OK
    for path, result, duration in _map(_detect_one, [(p, cfg) for p in inputs], args.workers):
        if args.output is None:
            out = Path(path).with_suffix(".sad.lab")
        elif args.output.is_dir():
            out = args.output / (Path(path).stem + ".lab")
        else:
            out = args.output
        write_labels(frames_to_labels(result.decisions, duration), out)
        detail = " ".join(f"{k}={v:.4f}" for k, v in result.timings.items())
        print(f"{path}: wrote {out} speech={100 * result.decisions.speech_fraction:.2f}% "
              f"rtf={result.realtime_factor:.5f} {detail}")
        if result.fallback:
            print(f"{path}: fallback to threshold decision ({result.fallback})", file=sys.stderr)
            status = EXIT_FALLBACK
    return status


def cmd_score(args: argparse.Namespace) -> int:
    _, m = score_tracks(read_labels(args.hyp), read_labels(args.ref), args.frame_shift, args.collar)
    sys.stdout.write(m.table())
    sys.stdout.write(m.key_values())
    return EXIT_OK


def parse_grid(items: Sequence[str]) -> list[dict[str, Any]]:
    """``["threshold_factor=1,2", "use_hmm=false"]`` -> cartesian product of settings."""
    axes = []
    for item in items:
        key, sep, values = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not values:
            raise ConfigError(f"bad grid entry {item!r}; expected key=v1,v2,...")
        # postprocess values contain commas themselves; separate them with ';'
        split = values.split(";") if key == "postprocess" else values.split(",")
        axes.append([(key, coerce_value(key, v)) for v in split])
    return [dict(point) for point in itertools.product(*axes)] if axes else [{}]


def _sweep_one(job: tuple[str, str, PipelineConfig, dict, float]) -> dict[str, Any]:
    wav, lab, cfg, point, collar = job
    clip = read_wav(wav)
    result = detect(clip, cfg)
    ref = labels_to_frames(read_labels(lab), cfg.frame_shift, len(result.decisions))
    c = count(result.decisions, ref, collar)
    m = metrics(c)
    row: dict[str, Any] = {"recording": Path(wav).stem, **point}
    row.update(tp=c.tp, fp=c.fp, tn=c.tn, fn=c.fn)
    row.update({k: f"{100 * v:.4f}" for k, v in m.as_dict().items()})
    row["fallback"] = int(result.fallback is not None)
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    base = config_from_args(args)
    grid = parse_grid(args.grid)
    wavs = sorted(Path(args.corpus).glob("*.wav"))
    pairs = [(w, w.with_suffix(".lab")) for w in wavs if w.with_suffix(".lab").exists()]
    if not pairs:
        raise ConfigError(f"no .wav/.lab pairs in {args.corpus}")
    jobs = [(str(w), str(lab), base.replace(**point), point, args.collar) for w, lab in pairs for point in grid]
    rows = _map(_sweep_one, jobs, args.workers)
    keys = list(grid[0].keys())
    header = ["recording", *keys, "tp", "fp", "tn", "fn", "precision", "recall", "f1", "dcf", "fallback"]
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    spec = CorpusSpec(
        duration=args.duration,
        speech_ratio=args.speech_ratio,
        snr_db=args.snr_db,
        noise_profile=args.noise_profile,
        seed=args.seed,
        sample_rate=args.sample_rate,
    )
    for wav in write_corpus(args.directory, spec, args.count):
        print(wav)
    return EXIT_OK


def cmd_dump(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    result = detect(read_wav(args.audio), cfg)
    csv_text = result.track.to_csv()
    if args.csbe:
        Path(args.csbe).write_text(csv_text)
    model_text = result.hmm.dump() if result.hmm else "# no model: fallback taken\n"
    if args.model:
        Path(args.model).write_text(model_text)
    if not args.csbe and not args.model:
        sys.stdout.write(csv_text)
    return EXIT_FALLBACK if result.fallback else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statsad", description="Unsupervised statistical speech activity detection")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="label speech in WAV files")
    p.add_argument("audio", nargs="+", type=Path)
    p.add_argument("-o", "--output", type=Path, help="label file (one input) or directory")
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("score", help="frame-based P/R/F1/DCF of a hypothesis against a reference")
    p.add_argument("hyp", type=Path)
    p.add_argument("ref", type=Path)
    p.add_argument("--frame-shift", "--frame_shift", type=float, default=0.01)
    p.add_argument("--collar", type=float, default=0.0)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sweep", help="score a corpus over a grid of configuration values")
    p.add_argument("corpus", type=Path)
    p.add_argument("--grid", action="append", default=[], help="key=v1,v2 (postprocess values separated by ';')")
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--collar", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic labelled corpus")
    p.add_argument("directory", type=Path)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--speech-ratio", "--speech_ratio", type=float, default=0.30)
    p.add_argument("--snr-db", "--snr_db", type=float, default=5.0)
    p.add_argument("--noise-profile", "--noise_profile", choices=NOISE_PROFILES, default="time-varying-white")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", "--sample_rate", type=int, default=8000)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("dump", help="write the CSBE track (CSV) and fitted models (key=value)")
    p.add_argument("audio", type=Path)
    p.add_argument("--csbe", type=Path)
    p.add_argument("--model", type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, AudioFormatError, LabelParseError, ConfigError, ValueError) as exc:
        print(f"statsad: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
