"""Key=value configuration parsing, rendering, and validation."""

from __future__ import annotations

import pytest

from galdetect.config import default_config, parse_config, render_config
from galdetect.errors import ConfigError


def test_default_round_trip():
    cfg = default_config()
    text = render_config(cfg)
    assert parse_config(text) == cfg
    # rendering is canonical: a second pass is identical
    assert render_config(parse_config(text)) == text


def test_parse_minimal_and_comments():
    cfg = parse_config("""
# comment line
seed = 42

train.epochs = 3  # trailing noise is part of the value only if unspaced
""".replace("  # trailing noise is part of the value only if unspaced", ""))
    assert cfg.seed == 42
    assert cfg.train.epochs == 3
    # untouched keys keep defaults
    assert cfg.model.architecture == "cnn"


def test_unknown_key_reports_line_number():
    with pytest.raises(ConfigError) as err:
        parse_config("seed = 1\nsynth.bogus = 2\n")
    msg = str(err.value)
    assert "synth.bogus" in msg
    assert "2" in msg


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("seed = 1\nseed = 2\n")
    assert "seed" in str(err.value)


def test_malformed_line_rejected():
    with pytest.raises(ConfigError):
        parse_config("seed : 1\n")


def test_type_errors_are_config_errors():
    with pytest.raises(ConfigError):
        parse_config("seed = banana\n")
    with pytest.raises(ConfigError):
        parse_config("train.learning_rate = fast\n")
    with pytest.raises(ConfigError):
        parse_config("preprocess.standardize = maybe\n")
    with pytest.raises(ConfigError):
        parse_config("model.architecture = transformer\n")
    with pytest.raises(ConfigError):
        parse_config("synth.signature_kind = square\n")


def test_overrides_apply_after_file():
    cfg = parse_config("seed = 1\ntrain.epochs = 5\n",
                       overrides={"train.epochs": "9", "model.fc_width": "32"})
    assert cfg.train.epochs == 9
    assert cfg.model.fc_width == 32
    assert cfg.seed == 1
    with pytest.raises(ConfigError):
        parse_config("seed = 1\n", overrides={"no.such.key": "1"})


def test_float_list_parsing():
    cfg = parse_config("synth.frequencies_hz = 3.0, 5.0, 7.0, 9.0, 11.0, 13.0\n")
    assert cfg.synth.frequencies_hz == (3.0, 5.0, 7.0, 9.0, 11.0, 13.0)
    cfg = parse_config("synth.channel_gains = 0.5,1.0,2.0,4.0,1.0,1.0,1.0,1.0\n")
    assert cfg.synth.channel_gains == (0.5, 1.0, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ConfigError):
        parse_config("synth.frequencies_hz = 3.0, x\n")


def test_validation_rules():
    # six per-event frequencies exactly
    with pytest.raises(ConfigError):
        parse_config("synth.frequencies_hz = 3.0, 5.0\n")
    # gains must cover every channel and stay positive
    with pytest.raises(ConfigError):
        parse_config("synth.channel_gains = 1.0, 2.0\n")
    with pytest.raises(ConfigError):
        parse_config("synth.n_channels = 2\nsynth.channel_gains = 1.0, -2.0\n")
    with pytest.raises(ConfigError):
        parse_config("synth.footprint_channels = 99\n")
    with pytest.raises(ConfigError):
        parse_config("synth.template_seed = -1\n")
    with pytest.raises(ConfigError):
        parse_config("window.length = 0\n")
    with pytest.raises(ConfigError):
        parse_config("preprocess.levels = 0\n")
    with pytest.raises(ConfigError):
        parse_config("preprocess.kind = fourier\n")
    with pytest.raises(ConfigError):
        parse_config("train.epochs = 0\n")
    with pytest.raises(ConfigError):
        parse_config("model.dropout = 1.5\n")
    with pytest.raises(ConfigError):
        parse_config("data.source = magic\n")


def test_synth_spec_uses_explicit_frequencies():
    cfg = parse_config("synth.frequencies_hz = 4.0, 6.0, 8.0, 10.0, 12.0, 14.0\n"
                       "synth.amplitude = 3.0\n")
    spec = cfg.synth.spec(seed=7)
    assert tuple(s.frequency_hz for s in spec.signatures) == (
        4.0, 6.0, 8.0, 10.0, 12.0, 14.0)
    assert all(s.amplitude == 3.0 for s in spec.signatures)
    assert spec.seed == 7
    assert spec.template_seed == cfg.synth.template_seed


def test_boolean_rendering_round_trip():
    cfg = parse_config("preprocess.standardize = false\n")
    assert cfg.preprocess.standardize is False
    assert "preprocess.standardize = false" in render_config(cfg)
