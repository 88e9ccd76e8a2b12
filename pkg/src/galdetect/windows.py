"""Causal sliding windows over recordings and series-level train/test splits."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .data import EventLabels, N_EVENTS, Recording, label_windows
from .errors import InsufficientSeries, RecordingTooShort


@dataclass(frozen=True)
class WindowSpec:
    """Geometry of the sliding window.

    A window covering samples ``[end - length + 1, end]`` uses only past
    and current samples; `stride` advances the end index between windows;
    `label_tolerance` widens the activity test around each window end.
    """

    length: int = 256
    stride: int = 32
    label_tolerance: int = 75

    def __post_init__(self):
        if self.length < 1 or self.stride < 1:
            raise ValueError("length and stride must be >= 1")
        if self.label_tolerance < 0:
            raise ValueError("label_tolerance must be >= 0")


@dataclass(frozen=True)
class WindowBatch:
    """Stacked windows ready for a scorer.

    `samples` is (W, C, T); `targets` is (W, 6) in {0,1}; `end_indices`
    maps each window back to its recording position.
    """

    samples: np.ndarray
    targets: np.ndarray
    end_indices: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.uint8)
        ends = np.asarray(self.end_indices, dtype=np.int64)
        if samples.ndim != 3:
            raise ValueError(f"samples must be (W, C, T), got ndim={samples.ndim}")
        w = samples.shape[0]
        if targets.shape != (w, N_EVENTS):
            raise ValueError(f"targets must be ({w}, {N_EVENTS}), got {targets.shape}")
        if ends.shape != (w,):
            raise ValueError(f"end_indices must be ({w},), got {ends.shape}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "end_indices", ends)

    @property
    def n_windows(self) -> int:
        return self.samples.shape[0]


def make_windows(rec: Recording, labels: EventLabels, spec: WindowSpec,
                 stride: int | None = None) -> WindowBatch:
    """Slice a recording into causal windows with aligned targets.

    Window ends start at ``length - 1`` and advance by the stride, so the
    first full window is the earliest one expressible without padding.
    An explicit `stride` overrides the spec (denser evaluation sweeps).
    """
    if labels.n_samples != rec.n_samples:
        raise ValueError(
            f"labels cover {labels.n_samples} samples, recording has {rec.n_samples}"
        )
    step = spec.stride if stride is None else stride
    if step < 1:
        raise ValueError("stride must be >= 1")
    if rec.n_samples < spec.length:
        raise RecordingTooShort(
            f"recording of {rec.n_samples} samples cannot hold a window of {spec.length}"
        )
    ends = np.arange(spec.length - 1, rec.n_samples, step, dtype=np.int64)
    starts = ends - spec.length + 1
    idx = starts[:, None] + np.arange(spec.length)[None, :]
    samples = rec.samples[:, idx].transpose(1, 0, 2)  # (W, C, T)
    targets = label_windows(labels, ends, spec.label_tolerance)
    return WindowBatch(samples, targets, ends)


def concat_batches(batches: list[WindowBatch]) -> WindowBatch:
    if not batches:
        raise ValueError("nothing to concatenate")
    return WindowBatch(
        np.concatenate([b.samples for b in batches], axis=0),
        np.concatenate([b.targets for b in batches], axis=0),
        np.concatenate([b.end_indices for b in batches], axis=0),
    )


def natural_key(key: tuple[str, str]) -> tuple:
    parts = []
    for field in key:
        for piece in re.split(r"(\d+)", field):
            parts.append(int(piece) if piece.isdigit() else piece)
    return tuple(parts)


def split_by_series(items: dict, holdout_series: int = 1) -> tuple[dict, dict]:
    """Hold out the last series per subject for testing.

    `items` is keyed by ``(subject_id, series_id)``; values pass through
    untouched. Series order is natural (series2 before series10). Every
    subject must keep at least one training series.
    """
    if holdout_series < 1:
        raise ValueError("holdout_series must be >= 1")
    by_subject: dict[str, list] = {}
    for key in items:
        by_subject.setdefault(key[0], []).append(key)
    train: dict = {}
    test: dict = {}
    for subject, keys in by_subject.items():
        keys.sort(key=natural_key)
        if len(keys) <= holdout_series:
            raise InsufficientSeries(
                f"subject {subject!r} has {len(keys)} series, cannot hold out {holdout_series}"
            )
        for key in keys[:-holdout_series]:
            train[key] = items[key]
        for key in keys[-holdout_series:]:
            test[key] = items[key]
    return train, test
