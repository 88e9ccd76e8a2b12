"""Command line entry point.

Subcommands: ``synth`` writes a synthetic CSV corpus, ``denoise`` conditions
one recording, ``train`` fits a scorer and saves a checkpoint, ``eval``
scores a checkpoint on the held-out series, ``report`` pretty-prints a saved
evaluation. Exit codes: 0 success, 2 configuration problems, 3 data
problems, 4 runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .config import ExperimentConfig, parse_config, render_config
from .data import (
    EVENT_CODES,
    load_data_csv,
    serialize_data_csv,
    serialize_events_csv,
)
from .errors import CheckpointMismatch, ConfigError, DataError, GalError
from .metrics import curve_to_csv, report_to_json, report_to_table
from .models import load_checkpoint, save_checkpoint, trace_to_csv
from .util import atomic_write_text


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="key=value configuration file (defaults apply if omitted)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    p.add_argument("--seed", type=int, default=None, help="override the run seed")
    p.add_argument("--out", type=Path, default=Path("galdetect_out"),
                   help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="galdetect",
        description="EEG grasp-and-lift event detection pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic CSV corpus")
    _add_common(p)

    p = sub.add_parser("denoise", help="condition one recording and write it back out")
    _add_common(p)
    p.add_argument("--input", type=Path, default=None,
                   help="a *_data.csv file; omitted means synthetic series 1")

    p = sub.add_parser("train", help="train a scorer, keep its best-validation epoch")
    _add_common(p)

    p = sub.add_parser("eval", help="score a checkpoint on the held-out series")
    _add_common(p)
    p.add_argument("--checkpoint", type=Path, required=True)

    p = sub.add_parser("report", help="pretty-print a saved evaluation report")
    p.add_argument("--report", type=Path, required=True, dest="report_path")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
    overrides: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    return parse_config(text, overrides)


def _echo_config(cfg: ExperimentConfig, out: Path) -> None:
    atomic_write_text(out / "resolved.cfg", render_config(cfg))


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    series = pipeline.synthetic_series(cfg)
    _echo_config(cfg, args.out)
    for (subject, sid), (rec, labels) in sorted(series.items()):
        stem = f"{subject}_{sid}"
        atomic_write_text(args.out / f"{stem}_data.csv", serialize_data_csv(rec))
        atomic_write_text(args.out / f"{stem}_events.csv",
                          serialize_events_csv(labels, subject, sid))
        print(f"wrote {stem}: {rec.n_channels} channels x {rec.n_samples} samples")
    return 0


def cmd_denoise(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if args.input is not None:
        rec = load_data_csv(args.input, cfg.data_sample_rate)
        stem = args.input.stem.removesuffix("_data")
    else:
        series = pipeline.synthetic_series(cfg)
        key = sorted(series)[0]
        rec = series[key][0]
        stem = f"{key[0]}_{key[1]}"
    conditioned = pipeline.preprocess_recording(cfg, rec)
    _echo_config(cfg, args.out)
    atomic_write_text(args.out / f"{stem}_denoised.csv", serialize_data_csv(conditioned))
    summary = {
        "kind": cfg.preprocess.kind,
        "channels": list(rec.channels),
        "variance_before": [float(v) for v in rec.samples.var(axis=1)],
        "variance_after": [float(v) for v in conditioned.samples.var(axis=1)],
        "max_abs_deviation": [
            float(v)
            for v in np.abs(conditioned.samples - rec.samples).max(axis=1)
        ],
    }
    atomic_write_text(args.out / f"{stem}_denoise_summary.json",
                      json.dumps(summary, indent=2) + "\n")
    print(f"wrote {stem}_denoised.csv ({cfg.preprocess.kind})")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    result, test_batch = pipeline.run_training(cfg)
    _echo_config(cfg, args.out)
    atomic_write_text(args.out / "trace.csv", trace_to_csv(result))
    save_checkpoint(
        args.out / "checkpoint.npz", result.model, cfg.seed,
        result.best_epoch, result.best_val_auc,
        extra={"n_holdout_windows": int(test_batch.n_windows)},
    )
    for rec in result.trace:
        print(f"epoch {rec.epoch}: loss {rec.train_loss:.4f}, val auc {rec.val_auc:.4f}")
    print(f"best epoch {result.best_epoch}: val auc {result.best_val_auc:.4f} "
          f"({result.model.num_params()} parameters)")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    model, meta = load_checkpoint(args.checkpoint)
    _, test_batch = pipeline.prepare_batches(cfg)
    if tuple(test_batch.samples.shape[1:]) != tuple(model.input_shape):
        raise CheckpointMismatch(
            f"checkpoint expects windows of {tuple(model.input_shape)}, "
            f"configuration produces {tuple(test_batch.samples.shape[1:])}"
        )
    report = pipeline.evaluate_batch(model, test_batch)
    _echo_config(cfg, args.out)
    atomic_write_text(args.out / "report.json", report_to_json(report))
    atomic_write_text(args.out / "report.txt", report_to_table(report))
    for code, curve in zip(EVENT_CODES, report.curves):
        if curve is not None:
            atomic_write_text(args.out / f"roc_{code}.csv", curve_to_csv(curve))
    sys.stdout.write(report_to_table(report))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    try:
        payload = json.loads(args.report_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DataError(f"cannot read report {args.report_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DataError(f"{args.report_path}: not a report file ({e})") from e
    try:
        width = max(len(e["name"]) for e in payload["events"])
        lines = [f"{'event':<{width}}  {'auc':>7}  {'positives':>9}"]
        for entry in payload["events"]:
            shown = "   --- " if entry["auc"] is None else f"{entry['auc']:7.4f}"
            lines.append(f"{entry['name']:<{width}}  {shown}  {entry['positives']:9d}")
        lines.append(f"{'mean':<{width}}  {payload['mean_auc']:7.4f}  {payload['n_windows']:9d}")
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{args.report_path}: malformed report ({e})") from e
    print("\n".join(lines))
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "denoise": cmd_denoise,
    "train": cmd_train,
    "eval": cmd_eval,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stage = {"synth": "synthesis", "denoise": "conditioning", "train": "training",
             "eval": "evaluation", "report": "reporting"}[args.command]
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"galdetect {stage} error (config): {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"galdetect {stage} error (data): {e}", file=sys.stderr)
        return 3
    except GalError as e:
        print(f"galdetect {stage} error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
