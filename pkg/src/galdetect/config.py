"""Flat key=value experiment configuration.

One assignment per line, ``#`` starts a full-line comment, unknown keys and
malformed values are hard errors. Every run echoes its fully resolved
configuration, and parsing that echo reproduces the configuration exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import EventSignature, SyntheticSpec, default_signatures
from .errors import ConfigError
from .models import ModelConfig, TrainConfig
from .windows import WindowSpec


@dataclass(frozen=True)
class PreprocessSettings:
    """Which conditioning to run before windowing."""

    kind: str = "dwt"  # none | dwt | butterworth
    wavelet: str = "db2"
    levels: int = 4
    threshold: float | str = "universal"
    filter_kind: str = "highpass"  # highpass | bandpass
    cutoff_low_hz: float = 0.5
    cutoff_high_hz: float = 30.0
    order: int = 5
    standardize: bool = True


@dataclass(frozen=True)
class SynthesisSettings:
    """Synthetic corpus shape; per-series seeds derive from the run seed."""

    n_series: int = 4
    n_channels: int = 8
    n_samples: int = 6000
    sample_rate: float = 100.0
    occurrences: int = 8
    amplitude: float = 2.0
    duration_s: float = 0.5
    base_frequency_hz: float = 3.0
    frequency_step_hz: float = 2.0
    frequencies_hz: tuple[float, ...] = ()  # explicit carriers override base/step
    noise_std: float = 0.5
    spike_rate: float = 0.0
    spike_amplitude: float = 0.0
    channel_gains: tuple[float, ...] = ()  # per-channel scale; empty = all 1.0
    footprint_channels: int = 0  # channels per event burst; 0 = all channels
    signature_kind: str = "sine"  # sine | template
    template_seed: int = 0  # fixes the template waveforms across runs

    def spec(self, seed: int) -> SyntheticSpec:
        if self.frequencies_hz:
            signatures = tuple(
                EventSignature(f, self.amplitude, self.duration_s)
                for f in self.frequencies_hz
            )
        else:
            signatures = default_signatures(self.amplitude, self.duration_s,
                                            self.base_frequency_hz,
                                            self.frequency_step_hz)
        return SyntheticSpec(
            n_channels=self.n_channels,
            n_samples=self.n_samples,
            sample_rate=self.sample_rate,
            signatures=signatures,
            occurrences_per_event=self.occurrences,
            noise_std=self.noise_std,
            spike_rate=self.spike_rate,
            spike_amplitude=self.spike_amplitude,
            channel_gains=self.channel_gains,
            footprint_channels=self.footprint_channels,
            signature_kind=self.signature_kind,
            template_seed=self.template_seed,
            seed=seed,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    data_source: str = "synthetic"  # synthetic | csv
    data_paths: tuple[str, ...] = ()
    data_sample_rate: float = 500.0
    synth: SynthesisSettings = field(default_factory=SynthesisSettings)
    preprocess: PreprocessSettings = field(default_factory=PreprocessSettings)
    window: WindowSpec = field(default_factory=WindowSpec)
    eval_stride: int = 32
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    holdout_series: int = 1


def _parse_bool(s: str) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ValueError(f"expected true or false, got {s!r}")


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    v = float(s)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"value must be finite, got {s!r}")
    return v


def _parse_str(s: str) -> str:
    return s


def _parse_paths(s: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in s.split(",") if p.strip())


def _parse_float_list(s: str) -> tuple[float, ...]:
    return tuple(_parse_float(p.strip()) for p in s.split(",") if p.strip())


def _parse_threshold(s: str):
    if s == "universal":
        return s
    v = _parse_float(s)
    if v < 0:
        raise ValueError(f"threshold must be >= 0, got {s!r}")
    return v


def _choice(*options: str):
    def parse(s: str) -> str:
        if s not in options:
            raise ValueError(f"expected one of {options}, got {s!r}")
        return s
    return parse


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_render(v) for v in value)
    return str(value)


# (key, parser, getter into ExperimentConfig) in canonical echo order
_KEYS = [
    ("seed", _parse_int, lambda c: c.seed),
    ("data.source", _choice("synthetic", "csv"), lambda c: c.data_source),
    ("data.paths", _parse_paths, lambda c: c.data_paths),
    ("data.sample_rate", _parse_float, lambda c: c.data_sample_rate),
    ("synth.n_series", _parse_int, lambda c: c.synth.n_series),
    ("synth.n_channels", _parse_int, lambda c: c.synth.n_channels),
    ("synth.n_samples", _parse_int, lambda c: c.synth.n_samples),
    ("synth.sample_rate", _parse_float, lambda c: c.synth.sample_rate),
    ("synth.occurrences", _parse_int, lambda c: c.synth.occurrences),
    ("synth.amplitude", _parse_float, lambda c: c.synth.amplitude),
    ("synth.duration_s", _parse_float, lambda c: c.synth.duration_s),
    ("synth.base_frequency_hz", _parse_float, lambda c: c.synth.base_frequency_hz),
    ("synth.frequency_step_hz", _parse_float, lambda c: c.synth.frequency_step_hz),
    ("synth.frequencies_hz", _parse_float_list, lambda c: c.synth.frequencies_hz),
    ("synth.noise_std", _parse_float, lambda c: c.synth.noise_std),
    ("synth.spike_rate", _parse_float, lambda c: c.synth.spike_rate),
    ("synth.spike_amplitude", _parse_float, lambda c: c.synth.spike_amplitude),
    ("synth.channel_gains", _parse_float_list, lambda c: c.synth.channel_gains),
    ("synth.footprint_channels", _parse_int, lambda c: c.synth.footprint_channels),
    ("synth.signature_kind", _choice("sine", "template"), lambda c: c.synth.signature_kind),
    ("synth.template_seed", _parse_int, lambda c: c.synth.template_seed),
    ("preprocess.kind", _choice("none", "dwt", "butterworth"), lambda c: c.preprocess.kind),
    ("preprocess.wavelet", _choice("db1", "db2"), lambda c: c.preprocess.wavelet),
    ("preprocess.levels", _parse_int, lambda c: c.preprocess.levels),
    ("preprocess.threshold", _parse_threshold, lambda c: c.preprocess.threshold),
    ("preprocess.filter_kind", _choice("highpass", "bandpass"), lambda c: c.preprocess.filter_kind),
    ("preprocess.cutoff_low_hz", _parse_float, lambda c: c.preprocess.cutoff_low_hz),
    ("preprocess.cutoff_high_hz", _parse_float, lambda c: c.preprocess.cutoff_high_hz),
    ("preprocess.order", _parse_int, lambda c: c.preprocess.order),
    ("preprocess.standardize", _parse_bool, lambda c: c.preprocess.standardize),
    ("window.length", _parse_int, lambda c: c.window.length),
    ("window.stride", _parse_int, lambda c: c.window.stride),
    ("window.eval_stride", _parse_int, lambda c: c.eval_stride),
    ("window.label_tolerance", _parse_int, lambda c: c.window.label_tolerance),
    ("model.architecture", _choice("cnn", "lstm"), lambda c: c.model.architecture),
    ("model.conv1_channels", _parse_int, lambda c: c.model.conv1_channels),
    ("model.conv2_channels", _parse_int, lambda c: c.model.conv2_channels),
    ("model.kernel_size", _parse_int, lambda c: c.model.kernel_size),
    ("model.conv_stride", _parse_int, lambda c: c.model.conv_stride),
    ("model.fc_width", _parse_int, lambda c: c.model.fc_width),
    ("model.hidden_size", _parse_int, lambda c: c.model.hidden_size),
    ("model.lstm_layers", _parse_int, lambda c: c.model.lstm_layers),
    ("model.dropout", _parse_float, lambda c: c.model.dropout),
    ("train.optimizer", _choice("adam", "sgd"), lambda c: c.train.optimizer),
    ("train.learning_rate", _parse_float, lambda c: c.train.learning_rate),
    ("train.momentum", _parse_float, lambda c: c.train.momentum),
    ("train.epochs", _parse_int, lambda c: c.train.epochs),
    ("train.batch_size", _parse_int, lambda c: c.train.batch_size),
    ("train.grad_clip", _parse_float, lambda c: c.train.grad_clip),
    ("split.holdout_series", _parse_int, lambda c: c.holdout_series),
]

_PARSERS = {key: parser for key, parser, _ in _KEYS}


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Build a configuration from key=value text plus optional overrides.

    Overrides (command-line flags) are applied after the file and use the
    same parsers.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    if overrides:
        for key, value in overrides.items():
            if key not in _PARSERS:
                raise ConfigError(f"unknown key {key!r}")
            raw[key] = value

    values: dict[str, object] = {}
    for key, value in raw.items():
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as e:
            raise ConfigError(f"key {key!r}: {e}") from None

    def take(key, default):
        return values.get(key, default)

    try:
        synth = SynthesisSettings(
            n_series=take("synth.n_series", 4),
            n_channels=take("synth.n_channels", 8),
            n_samples=take("synth.n_samples", 6000),
            sample_rate=take("synth.sample_rate", 100.0),
            occurrences=take("synth.occurrences", 8),
            amplitude=take("synth.amplitude", 2.0),
            duration_s=take("synth.duration_s", 0.5),
            base_frequency_hz=take("synth.base_frequency_hz", 3.0),
            frequency_step_hz=take("synth.frequency_step_hz", 2.0),
            frequencies_hz=take("synth.frequencies_hz", ()),
            noise_std=take("synth.noise_std", 0.5),
            spike_rate=take("synth.spike_rate", 0.0),
            spike_amplitude=take("synth.spike_amplitude", 0.0),
            channel_gains=take("synth.channel_gains", ()),
            footprint_channels=take("synth.footprint_channels", 0),
            signature_kind=take("synth.signature_kind", "sine"),
            template_seed=take("synth.template_seed", 0),
        )
        preprocess = PreprocessSettings(
            kind=take("preprocess.kind", "dwt"),
            wavelet=take("preprocess.wavelet", "db2"),
            levels=take("preprocess.levels", 4),
            threshold=take("preprocess.threshold", "universal"),
            filter_kind=take("preprocess.filter_kind", "highpass"),
            cutoff_low_hz=take("preprocess.cutoff_low_hz", 0.5),
            cutoff_high_hz=take("preprocess.cutoff_high_hz", 30.0),
            order=take("preprocess.order", 5),
            standardize=take("preprocess.standardize", True),
        )
        window = WindowSpec(
            length=take("window.length", 256),
            stride=take("window.stride", 32),
            label_tolerance=take("window.label_tolerance", 75),
        )
        model = ModelConfig(
            architecture=take("model.architecture", "cnn"),
            conv1_channels=take("model.conv1_channels", 16),
            conv2_channels=take("model.conv2_channels", 32),
            kernel_size=take("model.kernel_size", 3),
            conv_stride=take("model.conv_stride", 2),
            fc_width=take("model.fc_width", 64),
            hidden_size=take("model.hidden_size", 64),
            lstm_layers=take("model.lstm_layers", 4),
            dropout=take("model.dropout", 0.3),
        )
        train = TrainConfig(
            optimizer=take("train.optimizer", "adam"),
            learning_rate=take("train.learning_rate", 1e-3),
            momentum=take("train.momentum", 0.9),
            epochs=take("train.epochs", 20),
            batch_size=take("train.batch_size", 64),
            grad_clip=take("train.grad_clip", 0.0),
        )
        cfg = ExperimentConfig(
            seed=take("seed", 0),
            data_source=take("data.source", "synthetic"),
            data_paths=take("data.paths", ()),
            data_sample_rate=take("data.sample_rate", 500.0),
            synth=synth,
            preprocess=preprocess,
            window=window,
            eval_stride=take("window.eval_stride", 32),
            model=model,
            train=train,
            holdout_series=take("split.holdout_series", 1),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {cfg.seed}")
    if cfg.data_source == "csv" and not cfg.data_paths:
        raise ConfigError("data.source = csv requires data.paths")
    if cfg.eval_stride < 1:
        raise ConfigError(f"window.eval_stride must be >= 1, got {cfg.eval_stride}")
    if cfg.holdout_series < 1:
        raise ConfigError(f"split.holdout_series must be >= 1, got {cfg.holdout_series}")
    if cfg.preprocess.kind == "dwt" and cfg.preprocess.levels < 1:
        raise ConfigError(f"preprocess.levels must be >= 1, got {cfg.preprocess.levels}")
    if cfg.synth.frequencies_hz and len(cfg.synth.frequencies_hz) != 6:
        raise ConfigError(
            f"synth.frequencies_hz needs exactly 6 entries, got {len(cfg.synth.frequencies_hz)}"
        )
    gains = cfg.synth.channel_gains
    if gains:
        if len(gains) != cfg.synth.n_channels:
            raise ConfigError(
                f"synth.channel_gains needs {cfg.synth.n_channels} entries, "
                f"got {len(gains)}")
        if min(gains) <= 0:
            raise ConfigError("synth.channel_gains must all be positive")
    if not 0 <= cfg.synth.footprint_channels <= cfg.synth.n_channels:
        raise ConfigError(
            f"synth.footprint_channels must be in [0, {cfg.synth.n_channels}], "
            f"got {cfg.synth.footprint_channels}")
    if cfg.synth.template_seed < 0:
        raise ConfigError(
            f"synth.template_seed must be >= 0, got {cfg.synth.template_seed}")


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical echo; `parse_config(render_config(c))` equals `c`."""
    lines = [f"{key} = {_render(get(cfg))}" for key, _, get in _KEYS]
    return "\n".join(lines) + "\n"


def default_config() -> ExperimentConfig:
    return parse_config("")
