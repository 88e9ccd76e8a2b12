"""End-to-end wiring from a configuration to trained and evaluated scorers."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import dsp
from .config import ExperimentConfig
from .data import (
    EventLabels,
    Recording,
    load_data_csv,
    load_events_csv,
    synthesize,
)
from .errors import DataError
from .metrics import EvalReport, evaluate
from .models import TrainResult, predict, train_model
from .rng import substream
from .windows import (
    WindowBatch,
    concat_batches,
    make_windows,
    natural_key,
    split_by_series,
)

SeriesMap = dict[tuple[str, str], tuple[Recording, EventLabels]]


def series_seed(run_seed: int, index: int) -> int:
    """Per-series generator seed derived from the run seed."""
    return int(substream(run_seed, f"synth/series{index}").integers(0, 2 ** 31 - 1))


def synthetic_series(cfg: ExperimentConfig) -> SeriesMap:
    out: SeriesMap = {}
    for i in range(1, cfg.synth.n_series + 1):
        spec = cfg.synth.spec(series_seed(cfg.seed, i))
        rec, labels = synthesize(spec)
        rec = Recording(rec.channels, rec.samples, rec.sample_rate,
                        "synthetic", f"series{i}")
        out[(rec.subject_id, rec.series_id)] = (rec, labels)
    return out


def load_csv_series(cfg: ExperimentConfig) -> SeriesMap:
    out: SeriesMap = {}
    for path_str in cfg.data_paths:
        path = Path(path_str)
        if not path.name.endswith("_data.csv"):
            raise DataError(f"{path}: expected a *_data.csv path")
        rec = load_data_csv(path, cfg.data_sample_rate)
        events_path = path.with_name(path.name[:-len("_data.csv")] + "_events.csv")
        labels = load_events_csv(events_path, rec)
        key = (rec.subject_id, rec.series_id)
        if key in out:
            raise DataError(f"{path}: duplicate series {key}")
        out[key] = (rec, labels)
    return out


def load_series(cfg: ExperimentConfig) -> SeriesMap:
    if cfg.data_source == "synthetic":
        return synthetic_series(cfg)
    return load_csv_series(cfg)


def preprocess_recording(cfg: ExperimentConfig, rec: Recording) -> Recording:
    """Denoise one recording according to the configuration (no standardization)."""
    pp = cfg.preprocess
    if pp.kind == "none":
        return rec
    if pp.kind == "dwt":
        wav = dsp.wavelet(pp.wavelet)
        return dsp.denoise_recording(rec, wav, pp.levels, pp.threshold)
    high = pp.cutoff_high_hz if pp.filter_kind == "bandpass" else None
    spec = dsp.butterworth_design(pp.filter_kind, pp.cutoff_low_hz, high,
                                  pp.order, rec.sample_rate)
    return dsp.filter_recording(rec, spec)


def _ordered(keys) -> list:
    return sorted(keys, key=natural_key)


def prepare_batches(cfg: ExperimentConfig, series: SeriesMap | None = None,
                    ) -> tuple[WindowBatch, WindowBatch]:
    """Load, condition, split, standardize, and window the configured corpus.

    Standardization statistics come from the training series only and are
    applied to both splits. Test windows use the evaluation stride.
    """
    if series is None:
        series = load_series(cfg)
    conditioned = {key: (preprocess_recording(cfg, rec), labels)
                   for key, (rec, labels) in series.items()}
    train_map, test_map = split_by_series(conditioned, cfg.holdout_series)

    if cfg.preprocess.standardize:
        train_keys = _ordered(train_map)
        first = train_map[train_keys[0]][0]
        combined = np.concatenate(
            [train_map[k][0].samples for k in train_keys], axis=1)
        stats = dsp.fit_standardizer(
            Recording(first.channels, combined, first.sample_rate))
        train_map = {k: (dsp.standardize(rec, stats), lab)
                     for k, (rec, lab) in train_map.items()}
        test_map = {k: (dsp.standardize(rec, stats), lab)
                    for k, (rec, lab) in test_map.items()}

    train_batch = concat_batches(
        [make_windows(*train_map[k], cfg.window) for k in _ordered(train_map)])
    test_batch = concat_batches(
        [make_windows(*test_map[k], cfg.window, stride=cfg.eval_stride)
         for k in _ordered(test_map)])
    return train_batch, test_batch


def run_training(cfg: ExperimentConfig, series: SeriesMap | None = None) -> tuple[TrainResult, WindowBatch]:
    """Full training pipeline; returns the result plus the holdout batch."""
    train_batch, test_batch = prepare_batches(cfg, series)
    result = train_model(cfg.model, cfg.train, train_batch, test_batch, cfg.seed)
    return result, test_batch


def evaluate_batch(model, batch: WindowBatch, batch_size: int = 256) -> EvalReport:
    scores = predict(model, batch.samples, batch_size)
    return evaluate(scores, batch.targets)
