"""EEG data model: recordings, per-sample event labels, CSV ingestion,
synthetic recordings for desk-scale experiments, and window-label alignment.

File layout follows the public grasp-and-lift CSV pair convention:
``*_data.csv`` holds ``id,<ch1>,...,<chC>`` with one sample per line,
``*_events.csv`` holds ``id`` plus the six event columns, cells in {0,1}.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    IndexOutOfRange,
    LengthMismatch,
    MalformedHeader,
    NonBinaryCell,
    NonNumericCell,
    RaggedRow,
    WrongEventColumns,
)
from .rng import substream

EVENT_NAMES = (
    "HandStart",
    "FirstDigitTouch",
    "BothStartLoadPhase",
    "LiftOff",
    "Replace",
    "BothRelease",
)
EVENT_CODES = ("HS", "FDT", "BSP", "LO", "R", "BR")
N_EVENTS = len(EVENT_NAMES)

# Acquisition rate of the public grasp-and-lift recordings; the files
# themselves do not carry it.
DEFAULT_SAMPLE_RATE = 500.0

_ID_PATTERN = re.compile(r"^(?P<subject>.+?)_(?P<series>series\d+)_\d+$")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Recording:
    """Multichannel EEG time series, one row per channel, microvolts."""

    channels: tuple[str, ...]
    samples: np.ndarray  # (C, N) float64
    sample_rate: float
    subject_id: str = ""
    series_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ValueError(f"samples must be 2D (channels x time), got ndim={samples.ndim}")
        if samples.shape[1] < 1:
            raise ValueError("recording must contain at least one sample")
        if samples.shape[0] != len(self.channels):
            raise ValueError(
                f"{len(self.channels)} channel names but {samples.shape[0]} sample rows"
            )
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "samples", _freeze(samples))

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def with_samples(self, samples: np.ndarray) -> "Recording":
        """Copy of this recording with the sample matrix replaced."""
        return Recording(self.channels, samples, self.sample_rate,
                         self.subject_id, self.series_id)


@dataclass(frozen=True)
class EventLabels:
    """Per-sample binary activity of the six grasp-and-lift events."""

    events: tuple[str, ...]
    flags: np.ndarray  # (6, N) uint8

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=np.uint8)
        if len(self.events) != N_EVENTS:
            raise ValueError(f"expected {N_EVENTS} events, got {len(self.events)}")
        if flags.shape[0] != N_EVENTS:
            raise ValueError(f"flags must have {N_EVENTS} rows, got {flags.shape[0]}")
        if not np.isin(flags, (0, 1)).all():
            raise ValueError("flags entries must be 0 or 1")
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "flags", _freeze(flags))

    @property
    def n_samples(self) -> int:
        return self.flags.shape[1]


def _read_rows(path: str | Path) -> list[list[str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    return [line.split(",") for line in text.splitlines() if line]


def _infer_ids(first_id: str, path: Path) -> tuple[str, str]:
    m = _ID_PATTERN.match(first_id)
    if m:
        return m.group("subject"), m.group("series")
    m = re.match(r"^(?P<subject>.+?)_(?P<series>series\d+)_(data|events)$", path.stem)
    if m:
        return m.group("subject"), m.group("series")
    return path.stem, ""


def load_data_csv(path: str | Path, sample_rate: float = DEFAULT_SAMPLE_RATE) -> Recording:
    """Parse a ``*_data.csv`` file into a Recording.

    Header must be ``id`` followed by at least one channel name; every data
    row must have the same column count and numeric cells. Line numbers in
    errors are 1-based file positions.
    """
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise MalformedHeader(f"{path}: empty file")
    header = rows[0]
    if header[0] != "id" or len(header) < 2:
        raise MalformedHeader(
            f"{path}: header must be 'id,<ch1>,...', got {','.join(header[:4])!r}"
        )
    channels = tuple(header[1:])
    width = len(header)
    values = np.empty((len(rows) - 1, len(channels)), dtype=np.float64)
    for i, row in enumerate(rows[1:]):
        if len(row) != width:
            raise RaggedRow(
                f"{path}: line {i + 2} has {len(row)} columns, expected {width}"
            )
        try:
            values[i] = [float(c) for c in row[1:]]
        except ValueError:
            for j, cell in enumerate(row[1:]):
                try:
                    float(cell)
                except ValueError:
                    raise NonNumericCell(
                        f"{path}: line {i + 2}, column {channels[j]!r}: {cell!r}"
                    ) from None
            raise
    if values.shape[0] == 0:
        raise RaggedRow(f"{path}: no data rows")
    subject, series = _infer_ids(rows[1][0], path)
    return Recording(channels, values.T, sample_rate, subject, series)


def load_events_csv(path: str | Path, recording: Recording) -> EventLabels:
    """Parse a ``*_events.csv`` file aligned sample-for-sample with `recording`."""
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise MalformedHeader(f"{path}: empty file")
    header = rows[0]
    if header[0] != "id":
        raise MalformedHeader(f"{path}: first header column must be 'id'")
    if tuple(header[1:]) != EVENT_NAMES:
        raise WrongEventColumns(
            f"{path}: expected the six event columns {EVENT_NAMES}, got {tuple(header[1:])}"
        )
    if len(rows) - 1 != recording.n_samples:
        raise LengthMismatch(
            f"{path}: {len(rows) - 1} rows but recording has {recording.n_samples} samples"
        )
    flags = np.empty((N_EVENTS, recording.n_samples), dtype=np.uint8)
    for i, row in enumerate(rows[1:]):
        if len(row) != N_EVENTS + 1:
            raise RaggedRow(
                f"{path}: line {i + 2} has {len(row)} columns, expected {N_EVENTS + 1}"
            )
        for e, cell in enumerate(row[1:]):
            c = cell.strip()
            if c == "0":
                flags[e, i] = 0
            elif c == "1":
                flags[e, i] = 1
            else:
                raise NonBinaryCell(
                    f"{path}: line {i + 2}, event {EVENT_NAMES[e]}: {cell!r}"
                )
    return EventLabels(EVENT_NAMES, flags)


def _row_ids(subject_id: str, series_id: str, n: int) -> list[str]:
    if subject_id and series_id:
        return [f"{subject_id}_{series_id}_{i}" for i in range(n)]
    return [str(i) for i in range(n)]


def serialize_data_csv(rec: Recording) -> str:
    """Render a recording back to the data-CSV layout at full precision."""
    ids = _row_ids(rec.subject_id, rec.series_id, rec.n_samples)
    lines = ["id," + ",".join(rec.channels)]
    cols = rec.samples.T
    for i in range(rec.n_samples):
        lines.append(ids[i] + "," + ",".join(repr(float(v)) for v in cols[i]))
    return "\n".join(lines) + "\n"


def serialize_events_csv(labels: EventLabels, subject_id: str = "", series_id: str = "") -> str:
    ids = _row_ids(subject_id, series_id, labels.n_samples)
    lines = ["id," + ",".join(labels.events)]
    cols = labels.flags.T
    for i in range(labels.n_samples):
        lines.append(ids[i] + "," + ",".join(str(int(v)) for v in cols[i]))
    return "\n".join(lines) + "\n"


# --- synthetic recordings ----------------------------------------------------

@dataclass(frozen=True)
class EventSignature:
    """Deterministic burst template for one synthetic event.

    A sine carrier at `frequency_hz` under a half-sine envelope, scaled by
    `amplitude`, lasting `duration_s`.
    """

    frequency_hz: float
    amplitude: float
    duration_s: float = 0.5

    def __post_init__(self):
        if self.frequency_hz <= 0 or self.duration_s <= 0:
            raise ValueError("frequency and duration must be positive")


def default_signatures(amplitude: float = 2.0, duration_s: float = 0.5,
                       base_frequency_hz: float = 3.0,
                       frequency_step_hz: float = 2.0) -> tuple[EventSignature, ...]:
    """Six distinguishable burst templates, one per event (distinct carriers)."""
    return tuple(
        EventSignature(base_frequency_hz + frequency_step_hz * e, amplitude, duration_s)
        for e in range(N_EVENTS)
    )


@dataclass(frozen=True)
class SyntheticSpec:
    """Fully seeded description of one synthetic recording."""

    n_channels: int = 8
    n_samples: int = 6000
    sample_rate: float = 100.0
    signatures: tuple[EventSignature, ...] = field(default_factory=default_signatures)
    occurrences_per_event: int = 8
    noise_std: float = 0.5
    spike_rate: float = 0.0
    spike_amplitude: float = 0.0
    channel_gains: tuple[float, ...] = ()  # per-channel scale; empty = all 1.0
    footprint_channels: int = 0  # channels per event burst; 0 = all channels
    signature_kind: str = "sine"  # sine | template
    template_seed: int = 0  # template waveforms are shared across series
    seed: int = 0

    def __post_init__(self):
        if min(self.n_channels, self.n_samples, self.occurrences_per_event) < 1:
            raise ValueError("all counts must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if len(self.signatures) != N_EVENTS:
            raise ValueError(f"expected {N_EVENTS} signatures")
        if self.noise_std < 0 or self.spike_rate < 0 or not 0 <= self.spike_rate <= 1:
            raise ValueError("noise_std >= 0 and 0 <= spike_rate <= 1 required")
        if self.channel_gains:
            if len(self.channel_gains) != self.n_channels:
                raise ValueError(
                    f"channel_gains needs {self.n_channels} entries, "
                    f"got {len(self.channel_gains)}")
            if min(self.channel_gains) <= 0:
                raise ValueError("channel_gains must be positive")
        if not 0 <= self.footprint_channels <= self.n_channels:
            raise ValueError(
                f"footprint_channels must be in [0, {self.n_channels}], "
                f"got {self.footprint_channels}")
        if self.signature_kind not in ("sine", "template"):
            raise ValueError(
                f"signature_kind must be sine or template, got {self.signature_kind!r}")


@dataclass(frozen=True)
class SyntheticParts:
    """Generator bookkeeping: the additive components of a synthetic recording."""

    recording: Recording
    labels: EventLabels
    clean: np.ndarray   # (C, N) summed event waveforms
    noise: np.ndarray   # (C, N) white noise
    spikes: np.ndarray  # (C, N) impulsive artifacts


TEMPLATE_COMPONENTS = 5


def _event_template(template_seed: int, event: int, n_rows: int, dur: int,
                    fs: float) -> np.ndarray:
    """Fixed random spatio-temporal waveform for one event, unit RMS.

    Seeded by `template_seed` and the event index only, so every series of a
    run shares the same event templates. Component frequencies sit in the
    lower fifth of the band so denoising leaves the waveform intact.
    """
    rng = substream(template_seed, f"synth/template{event}")
    k = TEMPLATE_COMPONENTS
    freqs = rng.uniform(0.04 * fs, 0.16 * fs, k)
    phases = rng.uniform(0.0, 2.0 * math.pi, k)
    amps = rng.uniform(0.5, 1.0, k)
    weights = rng.normal(0.0, 1.0, (n_rows, k))
    t = np.arange(dur) / fs
    parts = amps[:, None] * np.sin(
        2 * math.pi * freqs[:, None] * t + phases[:, None])
    template = weights @ parts
    rms = math.sqrt(float(np.mean(template ** 2)))
    return template / (rms or 1.0)


def synthesize_parts(spec: SyntheticSpec, subject_id: str = "synthetic",
                     series_id: str = "series1") -> SyntheticParts:
    """Generate one recording plus its additive components.

    Deterministic in `spec` (seed included): every draw comes from the
    'synth' substream of `spec.seed` in a fixed order.
    """
    rng = substream(spec.seed, "synth")
    C, N, fs = spec.n_channels, spec.n_samples, spec.sample_rate

    clean = np.zeros((C, N))
    flags = np.zeros((N_EVENTS, N), dtype=np.uint8)
    for e, sig in enumerate(spec.signatures):
        dur = max(1, min(N, round(sig.duration_s * fs)))
        t = np.arange(dur) / fs
        envelope = np.sin(math.pi * (np.arange(dur) + 0.5) / dur)
        rows = slice(0, C)
        if 0 < spec.footprint_channels < C:
            # evenly spread contiguous per-event channel bands (overlap allowed)
            start = round(e * (C - spec.footprint_channels) / (N_EVENTS - 1))
            rows = slice(start, start + spec.footprint_channels)
        if spec.signature_kind == "template":
            n_rows = rows.stop - rows.start
            shape = _event_template(spec.template_seed, e, n_rows, dur, fs)
        else:
            shape = np.sin(2 * math.pi * sig.frequency_hz * t)
        burst = sig.amplitude * shape * envelope
        starts = rng.integers(0, N - dur + 1, size=spec.occurrences_per_event)
        for s in starts:
            clean[rows, s:s + dur] += burst
            flags[e, s:s + dur] = 1

    noise = np.zeros((C, N))
    if spec.noise_std > 0:
        noise = rng.normal(0.0, spec.noise_std, size=(C, N))
    spikes = np.zeros((C, N))
    if spec.spike_rate > 0 and spec.spike_amplitude != 0:
        mask = rng.random((C, N)) < spec.spike_rate
        signs = np.where(rng.random((C, N)) < 0.5, -1.0, 1.0)
        spikes = np.where(mask, signs * spec.spike_amplitude, 0.0)

    if spec.channel_gains:
        gains = np.asarray(spec.channel_gains, dtype=np.float64)[:, None]
        clean = clean * gains
        noise = noise * gains
        spikes = spikes * gains

    channels = tuple(f"ch{i + 1}" for i in range(C))
    rec = Recording(channels, clean + noise + spikes, fs, subject_id, series_id)
    return SyntheticParts(rec, EventLabels(EVENT_NAMES, flags), clean, noise, spikes)


def synthesize(spec: SyntheticSpec) -> tuple[Recording, EventLabels]:
    parts = synthesize_parts(spec)
    return parts.recording, parts.labels


# --- window targets ----------------------------------------------------------

def label_windows(labels: EventLabels, window_end_indices, tolerance: int) -> np.ndarray:
    """Per-window 6-dim binary targets.

    Window i's target for event e is 1 iff e is active at any sample within
    +-`tolerance` samples of ``window_end_indices[i]``.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    ends = np.asarray(window_end_indices, dtype=np.int64)
    n = labels.n_samples
    if ends.size and (ends.min() < 0 or ends.max() >= n):
        bad = ends[(ends < 0) | (ends >= n)][0]
        raise IndexOutOfRange(f"window end index {bad} outside [0, {n - 1}]")
    lo = np.clip(ends - tolerance, 0, n)
    hi = np.clip(ends + tolerance + 1, 0, n)
    # prefix sums give any-active-in-interval in O(1) per window
    csum = np.concatenate(
        [np.zeros((N_EVENTS, 1), dtype=np.int64), np.cumsum(labels.flags, axis=1, dtype=np.int64)],
        axis=1,
    )
    active = csum[:, hi] - csum[:, lo] > 0  # (6, W)
    return active.T.astype(np.uint8)
