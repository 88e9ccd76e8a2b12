"""Signal-conditioning correctness: wavelets, filters, standardization."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import make_recording
from galdetect import dsp
from galdetect.errors import (
    ChannelMismatch,
    DegenerateChannel,
    EmptyInput,
    InconsistentLengths,
    InvalidCutoff,
    TooShortForLevels,
)

SQRT2 = math.sqrt(2.0)


# --- wavelet filters ----------------------------------------------------------

def test_haar_filters():
    wav = dsp.wavelet("db1")
    assert np.allclose(wav.dec_lo, [1 / SQRT2, 1 / SQRT2], atol=1e-15)
    assert np.allclose(wav.dec_hi, [-1 / SQRT2, 1 / SQRT2], atol=1e-15)
    assert np.allclose(wav.rec_lo, wav.dec_lo[::-1], atol=0)
    assert np.allclose(wav.rec_hi, wav.dec_hi[::-1], atol=0)


def test_db2_filters_orthonormal():
    wav = dsp.wavelet("db2")
    s3 = math.sqrt(3.0)
    expected = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * SQRT2)
    lo, hi = np.asarray(wav.dec_lo), np.asarray(wav.dec_hi)
    assert np.allclose(lo, expected, atol=1e-15)
    # unit energy and zero mean of the highpass: orthonormal filter bank
    assert abs(np.sum(lo ** 2) - 1.0) < 1e-12
    assert abs(np.sum(hi)) < 1e-12
    assert abs(np.sum(lo) - SQRT2) < 1e-12


def test_unknown_wavelet_rejected():
    with pytest.raises(ValueError):
        dsp.wavelet("db3")


# --- decomposition against frozen and re-derived oracles ----------------------

def test_haar_periodic_level1_closed_form():
    x = np.array([4.0, 6.0, 10.0, 12.0, 14.0, 8.0, 6.0, 2.0])
    dec = dsp.dwt_decompose(x, dsp.wavelet("db1"), 1, mode="periodic")
    assert np.allclose(dec.approx, np.array([10.0, 22.0, 22.0, 8.0]) / SQRT2,
                       atol=1e-12)
    assert np.allclose(dec.details[0], np.array([-2.0, -2.0, 6.0, 4.0]) / SQRT2,
                       atol=1e-12)


def test_db2_symmetric_level1_frozen_values():
    x = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
    dec = dsp.dwt_decompose(x, dsp.wavelet("db2"), 1, mode="symmetric")
    frozen_approx = [3.535533905932737, 3.6649434284839977, 8.235753514826817,
                     5.941057285964639, 7.071067811865474]
    frozen_detail = [-1.224744871391588, 1.6383574304151085, 3.380740392011739,
                     -3.88908729652601, -2.449489742783176]
    assert np.allclose(dec.approx, frozen_approx, atol=1e-12)
    assert np.allclose(dec.details[0], frozen_detail, atol=1e-12)


def _analysis_oracle(x: np.ndarray, filt: np.ndarray) -> np.ndarray:
    # independent route: explicit half-point symmetric extension, then
    # numpy's convolution, then the odd-phase decimation
    L = len(filt)
    ext = np.concatenate([x[:L - 1][::-1], x, x[-(L - 1):][::-1]])
    valid = np.convolve(ext, filt)[L - 1:L - 1 + len(ext) - L + 1]
    return valid[1::2][:(len(x) + L - 1) // 2]


@pytest.mark.parametrize("name", ["db1", "db2"])
def test_level1_matches_independent_convolution(name, rng):
    wav = dsp.wavelet(name)
    for n in (8, 13, 21, 64):
        x = rng.standard_normal(n)
        dec = dsp.dwt_decompose(x, wav, 1, mode="symmetric")
        assert np.allclose(dec.approx, _analysis_oracle(x, wav.dec_lo), atol=1e-12)
        assert np.allclose(dec.details[0], _analysis_oracle(x, wav.dec_hi), atol=1e-12)


def test_db2_annihilates_linear_signal():
    # two vanishing moments: interior detail coefficients of a ramp are zero
    x = np.linspace(0.0, 5.0, 32)
    dec = dsp.dwt_decompose(x, dsp.wavelet("db2"), 1, mode="symmetric")
    assert np.max(np.abs(dec.details[0][1:-1])) < 1e-12


# --- perfect reconstruction ----------------------------------------------------

@pytest.mark.parametrize("name", ["db1", "db2"])
@pytest.mark.parametrize("mode", ["symmetric", "periodic"])
def test_perfect_reconstruction(name, mode, rng):
    wav = dsp.wavelet(name)
    for n in (16, 33, 100, 257):
        x = rng.standard_normal(n)
        for levels in range(1, min(4, dsp.max_levels(n, wav, mode)) + 1):
            dec = dsp.dwt_decompose(x, wav, levels, mode=mode)
            rec = dsp.dwt_reconstruct(dec)
            assert rec.shape == x.shape
            assert np.max(np.abs(rec - x)) < 1e-10, (name, mode, n, levels)


def test_haar_worked_example_roundtrip():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    dec = dsp.dwt_decompose(x, dsp.wavelet("db1"), 1, mode="periodic")
    assert np.allclose(dec.approx, [3 / SQRT2, 7 / SQRT2], atol=1e-12)
    assert np.allclose(dec.details[0], [-1 / SQRT2, -1 / SQRT2], atol=1e-12)
    assert np.allclose(dsp.dwt_reconstruct(dec), x, atol=1e-12)


def test_energy_preserved_in_periodic_mode(rng):
    wav = dsp.wavelet("db2")
    for n in (16, 64, 128):
        x = rng.standard_normal(n)
        dec = dsp.dwt_decompose(x, wav, 3, mode="periodic")
        coeff_energy = np.sum(dec.approx ** 2) + sum(
            np.sum(d ** 2) for d in dec.details)
        assert abs(coeff_energy - np.sum(x ** 2)) < 1e-8


def test_convolve_is_bilinear(rng):
    g = rng.standard_normal(5)
    x, y = rng.standard_normal(20), rng.standard_normal(20)
    a, b = 2.5, -1.25
    lhs = dsp.convolve(a * x + b * y, g)
    rhs = a * dsp.convolve(x, g) + b * dsp.convolve(y, g)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_convolve_matches_numpy(rng):
    x, g = rng.standard_normal(17), rng.standard_normal(4)
    assert np.allclose(dsp.convolve(x, g), np.convolve(x, g), atol=1e-12)


def test_decompose_validation():
    wav = dsp.wavelet("db2")
    with pytest.raises(TooShortForLevels):
        dsp.dwt_decompose(np.ones(4), wav, 3)
    with pytest.raises(EmptyInput):
        dsp.dwt_decompose(np.array([]), wav, 1)
    with pytest.raises(ValueError):
        dsp.dwt_decompose(np.ones(16), wav, 0)


def test_reconstruct_rejects_inconsistent_lengths():
    wav = dsp.wavelet("db1")
    dec = dsp.dwt_decompose(np.arange(16.0), wav, 2)
    bad = dsp.DwtDecomposition(dec.wavelet, dec.mode, dec.original_length,
                               dec.approx[:-1], dec.details)
    with pytest.raises(InconsistentLengths):
        dsp.dwt_reconstruct(bad)


# --- thresholding and denoising ------------------------------------------------

def test_soft_threshold_values():
    x = np.array([-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 3.0])
    out = dsp.soft_threshold(x, 0.5)
    assert np.allclose(out, [-2.5, -0.5, 0.0, 0.0, 0.0, 0.5, 2.5], atol=0)


def test_soft_threshold_is_contraction(rng):
    # 1-Lipschitz per coefficient
    a, b = rng.standard_normal(200), rng.standard_normal(200)
    for tau in (0.1, 0.7, 2.0):
        d = np.abs(dsp.soft_threshold(a, tau) - dsp.soft_threshold(b, tau))
        assert np.all(d <= np.abs(a - b) + 1e-15)


def test_universal_threshold_frozen_value():
    # sigma * sqrt(2 ln N) with sigma from the median absolute deviation of
    # the finest detail band; median |detail| = 1.3 * 0.6745 gives sigma 1.3
    detail = np.full(16, 1.3 * dsp.MAD_TO_SIGMA)
    dec = dsp.DwtDecomposition(dsp.wavelet("db2"), "symmetric", 2048,
                               np.zeros(16), (detail,))
    tau = dsp.universal_threshold(dec)
    assert abs(tau - 5.076535449814053) < 1e-12
    assert abs(tau - 1.3 * math.sqrt(2 * math.log(2048))) < 1e-12


def test_all_zero_coefficients_give_zero_signal():
    wav = dsp.wavelet("db2")
    dec = dsp.dwt_decompose(np.arange(32.0), wav, 2)
    zeroed = dsp.DwtDecomposition(
        dec.wavelet, dec.mode, dec.original_length,
        np.zeros_like(dec.approx), tuple(np.zeros_like(d) for d in dec.details))
    assert np.max(np.abs(dsp.dwt_reconstruct(zeroed))) == 0.0


def test_zeroed_approx_of_dc_signal_reconstructs_to_zero():
    # DC lives entirely in the approximation band
    wav = dsp.wavelet("db2")
    dec = dsp.dwt_decompose(np.full(64, 3.7), wav, 2, mode="periodic")
    no_approx = dsp.DwtDecomposition(
        dec.wavelet, dec.mode, dec.original_length,
        np.zeros_like(dec.approx), dec.details)
    assert np.max(np.abs(dsp.dwt_reconstruct(no_approx))) < 1e-10


def test_denoise_reduces_spikes_keeps_signal(rng):
    n = 2048
    t = np.arange(n) / 100.0
    signal = np.sin(2 * math.pi * 2.0 * t)
    noisy = signal + rng.normal(0.0, 0.3, n)
    spikes = np.zeros(n)
    spots = rng.integers(0, n, 20)
    spikes[spots] = 8.0
    out = dsp.wavelet_denoise(noisy + spikes, dsp.wavelet("db2"), 3)
    # soft thresholding shaves every spike coefficient, so spike residuals
    # shrink on average and the overall error drops
    residual = np.abs((out - signal)[spots])
    assert np.mean(residual) < 0.85 * 8.0
    assert np.max(residual) < 8.0
    assert np.sqrt(np.mean((out - signal) ** 2)) < np.sqrt(
        np.mean(((noisy + spikes) - signal) ** 2))


def test_denoise_fixed_zero_threshold_is_reconstruction(rng):
    x = rng.standard_normal(128)
    out = dsp.wavelet_denoise(x, dsp.wavelet("db2"), 2, threshold=0.0)
    assert np.max(np.abs(out - x)) < 1e-10


# --- Butterworth design --------------------------------------------------------

def test_highpass_minus_3db_at_cutoff():
    for fc in (0.5, 2.0, 30.0):
        spec = dsp.butterworth_design("highpass", fc, order=5, sample_rate=500.0)
        mag = np.abs(dsp.frequency_response(spec, [fc]))[0]
        assert abs(mag - 1 / SQRT2) < 1e-3


def test_highpass_dc_rejection_is_exact():
    spec = dsp.butterworth_design("highpass", 0.5, order=5, sample_rate=500.0)
    assert np.abs(dsp.frequency_response(spec, [0.0]))[0] < 1e-12


def test_highpass_octave_below_matches_closed_form():
    # |H(f)|^2 = (f/fc)^(2n) / (1 + (f/fc)^(2n)) for the analog prototype
    fc, n = 8.0, 5
    spec = dsp.butterworth_design("highpass", fc, order=n, sample_rate=500.0)
    mag = np.abs(dsp.frequency_response(spec, [fc / 2]))[0]
    assert abs(mag - 1 / math.sqrt(1 + 2.0 ** (2 * n))) < 1e-3


def test_highpass_monotone_magnitude():
    spec = dsp.butterworth_design("highpass", 5.0, order=5, sample_rate=500.0)
    freqs = np.linspace(0.0, 249.0, 400)
    mag = np.abs(dsp.frequency_response(spec, freqs))
    assert np.all(np.diff(mag) > -1e-9)


def test_bandpass_magnitude_shape():
    spec = dsp.butterworth_design("bandpass", 4.0, 40.0, order=5, sample_rate=500.0)
    lo, hi = np.abs(dsp.frequency_response(spec, [4.0, 40.0]))
    assert abs(lo - 1 / SQRT2) < 1e-3
    assert abs(hi - 1 / SQRT2) < 1e-3
    center = math.sqrt(4.0 * 40.0)
    cmag = np.abs(dsp.frequency_response(spec, [center]))[0]
    assert abs(cmag - 1.0) < 1e-6
    # unimodal: rises to the peak, falls after it
    freqs = np.linspace(0.1, 249.0, 500)
    mag = np.abs(dsp.frequency_response(spec, freqs))
    peak = int(np.argmax(mag))
    assert np.all(np.diff(mag[:peak + 1]) > -1e-9)
    assert np.all(np.diff(mag[peak:]) < 1e-9)


def test_butterworth_against_scipy_oracle():
    scipy_signal = pytest.importorskip("scipy.signal")
    freqs = np.linspace(0.0, 249.0, 300)
    for kind, args in (("highpass", (0.5, None)), ("bandpass", (4.0, 40.0))):
        spec = dsp.butterworth_design(kind, args[0], args[1], 5, 500.0)
        wn = args[0] if kind == "highpass" else [args[0], args[1]]
        sos = scipy_signal.butter(5, wn, btype=kind, fs=500.0, output="sos")
        _, h = scipy_signal.sosfreqz(sos, worN=freqs, fs=500.0)
        mag = np.abs(dsp.frequency_response(spec, freqs))
        assert np.max(np.abs(mag - np.abs(h))) < 1e-9


def test_sosfilt_matches_scipy_oracle(rng):
    scipy_signal = pytest.importorskip("scipy.signal")
    spec = dsp.butterworth_design("highpass", 2.0, order=5, sample_rate=100.0)
    x = rng.standard_normal(400)
    ours = dsp.sosfilt(spec.sections, x)
    theirs = scipy_signal.sosfilt(spec.sections, x)
    assert np.max(np.abs(ours - theirs)) < 1e-10


def test_zero_phase_application_kills_dc():
    spec = dsp.butterworth_design("highpass", 0.5, order=5, sample_rate=500.0)
    x = np.full(60000, 5.0)
    y = dsp.butterworth_apply(spec, x)
    middle = y[20000:40000]
    assert np.max(np.abs(middle)) < 1e-6


def test_butterworth_design_validation():
    with pytest.raises(InvalidCutoff):
        dsp.butterworth_design("highpass", 0.0, order=5, sample_rate=100.0)
    with pytest.raises(InvalidCutoff):
        dsp.butterworth_design("highpass", 60.0, order=5, sample_rate=100.0)
    with pytest.raises(InvalidCutoff):
        dsp.butterworth_design("bandpass", 30.0, 10.0, order=5, sample_rate=100.0)
    with pytest.raises(ValueError):
        dsp.butterworth_design("lowpass", 10.0, order=5, sample_rate=100.0)
    with pytest.raises(ValueError):
        dsp.butterworth_design("highpass", 10.0, order=0, sample_rate=100.0)


def test_cutoff_response_direct_cases():
    assert dsp.cutoff_response(0.0) == 1.0
    assert dsp.cutoff_response(1.0) == 0.5
    assert abs(dsp.cutoff_response(2.0) - 1.0 / 33.0) < 1e-15


# --- standardization -----------------------------------------------------------

def test_standardize_zero_mean_unit_std(rng):
    rec = make_recording(rng.normal(3.0, 2.5, size=(4, 500)))
    stats = dsp.fit_standardizer(rec)
    out = dsp.standardize(rec, stats)
    assert np.max(np.abs(out.samples.mean(axis=1))) < 1e-9
    assert np.max(np.abs(out.samples.std(axis=1) - 1.0)) < 1e-9


def test_standardize_matches_by_channel_name(rng):
    rec = make_recording(rng.normal(0.0, 1.0, size=(3, 100)))
    stats = dsp.fit_standardizer(rec)
    flipped = dsp.Recording(rec.channels[::-1], rec.samples[::-1].copy(),
                            rec.sample_rate, rec.subject_id, rec.series_id)
    out = dsp.standardize(flipped, stats)
    direct = dsp.standardize(rec, stats)
    assert np.allclose(out.samples[::-1], direct.samples, atol=0)


def test_standardize_validation(rng):
    rec = make_recording(rng.normal(0.0, 1.0, size=(2, 50)))
    stats = dsp.fit_standardizer(rec)
    other = make_recording(rng.normal(0.0, 1.0, size=(3, 50)))
    with pytest.raises(ChannelMismatch):
        dsp.standardize(other, stats)
    flat = rng.normal(0.0, 1.0, size=(2, 50))
    flat[1] = 7.0
    with pytest.raises(DegenerateChannel) as err:
        dsp.fit_standardizer(make_recording(flat))
    assert "ch2" in str(err.value)


# --- recording-level wrappers ---------------------------------------------------

def test_denoise_recording_per_channel(rng):
    rec = make_recording(rng.standard_normal((3, 256)))
    wav = dsp.wavelet("db2")
    out = dsp.denoise_recording(rec, wav, 2)
    for c in range(3):
        expected = dsp.wavelet_denoise(rec.samples[c], wav, 2)
        assert np.allclose(out.samples[c], expected, atol=0)
    assert out.channels == rec.channels
    assert out.sample_rate == rec.sample_rate


def test_filter_recording_checks_sample_rate(rng):
    rec = make_recording(rng.standard_normal((2, 300)), sample_rate=100.0)
    spec = dsp.butterworth_design("highpass", 1.0, order=5, sample_rate=500.0)
    with pytest.raises(InvalidCutoff):
        dsp.filter_recording(rec, spec)
    spec = dsp.butterworth_design("highpass", 1.0, order=5, sample_rate=100.0)
    out = dsp.filter_recording(rec, spec)
    assert out.samples.shape == rec.samples.shape
