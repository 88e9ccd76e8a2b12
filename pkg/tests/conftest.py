"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from galdetect.data import EVENT_NAMES, EventLabels, Recording


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def make_recording(samples: np.ndarray, sample_rate: float = 100.0,
                   subject_id: str = "subjA", series_id: str = "series1",
                   ) -> Recording:
    samples = np.asarray(samples, dtype=np.float64)
    channels = tuple(f"ch{i + 1}" for i in range(samples.shape[0]))
    return Recording(channels, samples, sample_rate, subject_id, series_id)


def make_labels(flags: np.ndarray) -> EventLabels:
    return EventLabels(EVENT_NAMES, np.asarray(flags, dtype=np.uint8))
