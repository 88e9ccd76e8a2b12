"""Signal conditioning built from first principles.

Provides Daubechies wavelet decomposition/reconstruction with soft-threshold
denoising, IIR Butterworth filters (highpass and bandpass) designed via the
bilinear transform and applied forward-backward for zero phase, per-channel
standardization, and the analytic magnitude response of the filter order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import Recording
from .errors import (
    ChannelMismatch,
    DegenerateChannel,
    EmptyInput,
    InconsistentLengths,
    InvalidCutoff,
    TooShortForLevels,
)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

# Scale factor relating the median absolute deviation of a zero-mean normal
# sample to its standard deviation.
MAD_TO_SIGMA = 0.6745


# --- wavelet filter bank -------------------------------------------------

@dataclass(frozen=True)
class Wavelet:
    """Orthogonal wavelet as its four filter taps.

    Decomposition highpass is the quadrature mirror of the lowpass,
    ``hi[k] = (-1)^(k+1) * lo[L-1-k]``; reconstruction filters are the
    time-reversed decomposition filters.
    """

    name: str
    dec_lo: tuple[float, ...]

    @property
    def length(self) -> int:
        return len(self.dec_lo)

    @property
    def dec_hi(self) -> tuple[float, ...]:
        L = self.length
        return tuple((-1.0) ** (k + 1) * self.dec_lo[L - 1 - k] for k in range(L))

    @property
    def rec_lo(self) -> tuple[float, ...]:
        return self.dec_lo[::-1]

    @property
    def rec_hi(self) -> tuple[float, ...]:
        return self.dec_hi[::-1]


_D2 = (1 + SQRT3, 3 + SQRT3, 3 - SQRT3, 1 - SQRT3)

_WAVELETS = {
    "db1": Wavelet("db1", (1 / SQRT2, 1 / SQRT2)),
    "db2": Wavelet("db2", tuple(c / (4 * SQRT2) for c in _D2)),
}


def wavelet(name: str) -> Wavelet:
    try:
        return _WAVELETS[name]
    except KeyError:
        raise ValueError(f"unknown wavelet {name!r}; available: {sorted(_WAVELETS)}") from None


def convolve(x, g) -> np.ndarray:
    """Full linear convolution; output length ``len(x) + len(g) - 1``."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if x.size == 0 or g.size == 0:
        raise EmptyInput("convolution requires non-empty inputs")
    return _kernels.convolve_full(np.ascontiguousarray(x), np.ascontiguousarray(g))


# --- single-level analysis / synthesis ------------------------------------

def _analyze_one(x: np.ndarray, wav: Wavelet, mode: str) -> tuple[np.ndarray, np.ndarray]:
    L = wav.length
    n = x.shape[0]
    if mode == "periodic" and n % 2 == 1:
        x = np.concatenate([x, x[-1:]])
        n += 1
    if mode == "symmetric":
        ext = np.concatenate([x[:L - 1][::-1], x, x[-(L - 1):][::-1]]) if L > 1 else x
        keep = (n + L - 1) // 2
    elif mode == "periodic":
        ext = np.concatenate([x[-(L - 1):], x, x[:L - 1]]) if L > 1 else x
        keep = n // 2
    else:
        raise ValueError(f"unknown extension mode {mode!r}")
    lo_full = convolve(ext, np.asarray(wav.dec_lo))
    hi_full = convolve(ext, np.asarray(wav.dec_hi))
    # valid part of the convolution, then the odd phase of the downsample
    lo = lo_full[L - 1:L - 1 + ext.shape[0] - L + 1][1::2][:keep]
    hi = hi_full[L - 1:L - 1 + ext.shape[0] - L + 1][1::2][:keep]
    return lo, hi


def _synthesize_one(approx: np.ndarray, detail: np.ndarray, wav: Wavelet,
                    mode: str, out_len: int) -> np.ndarray:
    L = wav.length
    c = approx.shape[0]
    if mode == "symmetric":
        up_a = np.zeros(2 * c - 1)
        up_d = np.zeros(2 * c - 1)
        up_a[::2] = approx
        up_d[::2] = detail
        y = convolve(up_a, np.asarray(wav.rec_lo)) + convolve(up_d, np.asarray(wav.rec_hi))
        if L > 2:
            y = y[L - 2:-(L - 2)]
        return y[:out_len]
    # periodic: transpose of the orthogonal analysis map on even length 2c
    n = 2 * c
    y = np.zeros(n)
    t = np.arange(c)
    lo = np.asarray(wav.dec_lo)
    hi = np.asarray(wav.dec_hi)
    for k in range(L):
        idx = (2 * t + 1 - k) % n
        np.add.at(y, idx, approx * lo[k])
        np.add.at(y, idx, detail * hi[k])
    return y[:out_len]


def _coeff_len(n: int, L: int, mode: str) -> int:
    if mode == "symmetric":
        return (n + L - 1) // 2
    return (n + 1) // 2


def _level_lengths(n: int, L: int, levels: int, mode: str) -> list[int]:
    lens = [n]
    for _ in range(levels):
        lens.append(_coeff_len(lens[-1], L, mode))
    return lens


def max_levels(n: int, wav: Wavelet, mode: str = "symmetric") -> int:
    """Largest decomposition depth where every analysis step sees >= L samples."""
    count = 0
    cur = n
    while cur >= wav.length:
        cur = _coeff_len(cur, wav.length, mode)
        count += 1
    return count


@dataclass(frozen=True)
class DwtDecomposition:
    """Multi-level wavelet analysis of a 1D signal.

    `details` is ordered deepest (coarsest) first; `approx` belongs to the
    deepest level. `original_length` pins down reconstruction crops exactly.
    """

    wavelet: Wavelet
    mode: str
    original_length: int
    approx: np.ndarray
    details: tuple[np.ndarray, ...]

    @property
    def levels(self) -> int:
        return len(self.details)


def dwt_decompose(x, wav: Wavelet, levels: int, mode: str = "symmetric") -> DwtDecomposition:
    """Iterated two-channel analysis: split, keep detail, recurse on approx."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected 1D signal, got ndim={x.ndim}")
    if x.size == 0:
        raise EmptyInput("cannot decompose an empty signal")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if mode not in ("symmetric", "periodic"):
        raise ValueError(f"unknown extension mode {mode!r}")
    feasible = max_levels(x.size, wav, mode)
    if levels > feasible:
        raise TooShortForLevels(
            f"signal of length {x.size} supports at most {feasible} "
            f"level(s) with {wav.name}, requested {levels}",
            max_levels=feasible,
        )
    details: list[np.ndarray] = []
    approx = x
    for _ in range(levels):
        approx, detail = _analyze_one(approx, wav, mode)
        details.append(detail)
    return DwtDecomposition(wav, mode, x.size, approx, tuple(details[::-1]))


def dwt_reconstruct(dec: DwtDecomposition) -> np.ndarray:
    """Invert `dwt_decompose`; exact up to floating-point rounding."""
    lens = _level_lengths(dec.original_length, dec.wavelet.length, dec.levels, dec.mode)
    expected = lens[:0:-1]  # deepest-first coefficient lengths
    for i, d in enumerate(dec.details):
        if d.shape[0] != expected[i]:
            raise InconsistentLengths(
                f"detail {i} has length {d.shape[0]}, expected {expected[i]} "
                f"for original length {dec.original_length}"
            )
    if dec.approx.shape[0] != expected[0]:
        raise InconsistentLengths(
            f"approx has length {dec.approx.shape[0]}, expected {expected[0]}"
        )
    x = dec.approx
    for i, d in enumerate(dec.details):
        out_len = lens[dec.levels - 1 - i]
        x = _synthesize_one(x, d, dec.wavelet, dec.mode, out_len)
    return x


def soft_threshold(coeffs: np.ndarray, tau: float) -> np.ndarray:
    """Shrink toward zero: sign(c) * max(|c| - tau, 0)."""
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - tau, 0.0)


def universal_threshold(dec: DwtDecomposition) -> float:
    """Noise-adaptive threshold sigma * sqrt(2 ln N).

    Sigma is estimated from the finest detail band via the median absolute
    deviation, a robust estimate unaffected by sparse large coefficients.
    """
    finest = dec.details[-1]
    sigma = float(np.median(np.abs(finest))) / MAD_TO_SIGMA
    return sigma * math.sqrt(2.0 * math.log(dec.original_length))


def wavelet_denoise(x, wav: Wavelet, levels: int, threshold: float | str = "universal",
                    mode: str = "symmetric") -> np.ndarray:
    """Soft-threshold every detail band, keep the approximation, reconstruct."""
    dec = dwt_decompose(x, wav, levels, mode)
    if threshold == "universal":
        tau = universal_threshold(dec)
    else:
        tau = float(threshold)
        if tau < 0:
            raise ValueError(f"threshold must be >= 0, got {tau}")
    shrunk = tuple(soft_threshold(d, tau) for d in dec.details)
    return dwt_reconstruct(
        DwtDecomposition(dec.wavelet, dec.mode, dec.original_length, dec.approx, shrunk)
    )


# --- Butterworth filters ---------------------------------------------------

@dataclass(frozen=True)
class ButterworthSpec:
    """Designed digital filter as second-order sections.

    Each row of `sections` is ``(b0, b1, b2, 1, a1, a2)`` in negative powers
    of z. `kind` is 'highpass' or 'bandpass'; cutoffs are in hertz.
    """

    kind: str
    order: int
    sample_rate: float
    cutoff_low_hz: float
    cutoff_high_hz: float | None
    sections: np.ndarray  # (S, 6)


def _prototype_poles(order: int) -> np.ndarray:
    k = np.arange(order)
    return np.exp(1j * math.pi * (2 * k + order + 1) / (2 * order))


def _prewarp(freq_hz: float, fs: float) -> float:
    return 2.0 * fs * math.tan(math.pi * freq_hz / fs)


def _bilinear(s_poles: np.ndarray, fs: float) -> np.ndarray:
    fs2 = 2.0 * fs
    return (fs2 + s_poles) / (fs2 - s_poles)


def _pair_conjugates(poles: np.ndarray) -> tuple[list[complex], list[float]]:
    """Split into one representative per conjugate pair plus real poles.

    Complex poles of a real-coefficient filter come in conjugate pairs, so
    the upper-half-plane members fully describe them.
    """
    tol = 1e-9 * max(1.0, float(np.abs(poles).max()))
    upper = sorted((complex(p) for p in poles if p.imag > tol),
                   key=lambda p: (p.real, p.imag))
    lower = [p for p in poles if p.imag < -tol]
    reals = sorted(float(p.real) for p in poles if abs(p.imag) <= tol)
    if len(upper) != len(lower):
        raise AssertionError("complex poles do not form conjugate pairs")
    return upper, reals


def butterworth_design(kind: str, cutoff_low_hz: float, cutoff_high_hz: float | None = None,
                       order: int = 5, sample_rate: float = 500.0) -> ButterworthSpec:
    """Design a digital Butterworth filter via the bilinear transform.

    The analog prototype's poles sit on the unit circle in the left half
    plane; cutoffs are prewarped so the digital -3 dB points land exactly on
    the requested frequencies.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    nyquist = sample_rate / 2.0
    if not 0 < cutoff_low_hz < nyquist:
        raise InvalidCutoff(
            f"cutoff {cutoff_low_hz} Hz outside (0, {nyquist}) at fs={sample_rate}"
        )
    if kind == "highpass":
        if cutoff_high_hz is not None:
            raise ValueError("highpass takes a single cutoff")
    elif kind == "bandpass":
        if cutoff_high_hz is None:
            raise ValueError("bandpass needs both cutoffs")
        if not cutoff_low_hz < cutoff_high_hz < nyquist:
            raise InvalidCutoff(
                f"bandpass needs 0 < low < high < {nyquist}, "
                f"got ({cutoff_low_hz}, {cutoff_high_hz})"
            )
    else:
        raise ValueError(f"kind must be 'highpass' or 'bandpass', got {kind!r}")

    proto = _prototype_poles(order)
    fs = sample_rate
    if kind == "highpass":
        wc = _prewarp(cutoff_low_hz, fs)
        s_poles = wc / proto
        z_poles = _bilinear(s_poles, fs)
        pairs, reals = _pair_conjugates(z_poles)
        sections = []
        for p in pairs:
            sections.append([1.0, -2.0, 1.0, 1.0, -2.0 * p.real, abs(p) ** 2])
        reals.sort()
        while len(reals) >= 2:
            r1, r2 = reals.pop(), reals.pop()
            sections.append([1.0, -2.0, 1.0, 1.0, -(r1 + r2), r1 * r2])
        if reals:
            r = reals.pop()
            sections.append([1.0, -1.0, 0.0, 1.0, -r, 0.0])
        sos = np.asarray(sections, dtype=np.float64)
        # unity gain at the Nyquist frequency (z = -1)
        gain = _sos_gain_at(sos, -1.0 + 0.0j)
        sos[0, :3] /= gain.real
    else:
        wl = _prewarp(cutoff_low_hz, fs)
        wh = _prewarp(cutoff_high_hz, fs)
        w0 = math.sqrt(wl * wh)
        bw = wh - wl
        s_poles = []
        for p in proto:
            # s^2 - (bw p) s + w0^2 = 0 maps one prototype pole to two
            disc = np.sqrt(np.complex128(bw * p) ** 2 - 4.0 * w0 * w0)
            s_poles.extend([(bw * p + disc) / 2.0, (bw * p - disc) / 2.0])
        z_poles = _bilinear(np.asarray(s_poles), fs)
        pairs, reals = _pair_conjugates(z_poles)
        # 2n poles make n sections, each carrying zeros at z = +1 and z = -1
        sections = []
        for p in pairs:
            sections.append([1.0, 0.0, -1.0, 1.0, -2.0 * p.real, abs(p) ** 2])
        while len(reals) >= 2:
            r1, r2 = reals.pop(), reals.pop()
            sections.append([1.0, 0.0, -1.0, 1.0, -(r1 + r2), r1 * r2])
        assert not reals, "bandpass pole count must be even"
        sos = np.asarray(sections, dtype=np.float64)
        # unity gain at the warped geometric center frequency
        omega0 = 2.0 * math.atan(w0 / (2.0 * fs))
        z0 = np.exp(1j * omega0)
        gain = _sos_gain_at(sos, z0)
        sos[0, :3] /= abs(gain)
    return ButterworthSpec(kind, order, sample_rate, cutoff_low_hz, cutoff_high_hz, sos)


def _sos_gain_at(sos: np.ndarray, z: complex) -> complex:
    zi1, zi2 = 1.0 / z, 1.0 / (z * z)
    h = 1.0 + 0.0j
    for b0, b1, b2, _, a1, a2 in sos:
        h *= (b0 + b1 * zi1 + b2 * zi2) / (1.0 + a1 * zi1 + a2 * zi2)
    return h


def frequency_response(spec: ButterworthSpec, freqs_hz) -> np.ndarray:
    """Complex single-pass response at the given frequencies."""
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    z = np.exp(2j * math.pi * freqs / spec.sample_rate)
    return np.array([_sos_gain_at(spec.sections, zz) for zz in z])


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Causal single-pass cascade of biquads, zero initial conditions."""
    return _kernels.sosfilt(np.ascontiguousarray(sos, dtype=np.float64),
                            np.ascontiguousarray(x, dtype=np.float64))


def butterworth_apply(spec: ButterworthSpec, x) -> np.ndarray:
    """Zero-phase application: filter forward, then backward.

    The magnitude response of the composite is the square of the designed
    single-pass response; phase distortion cancels exactly.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected 1D signal, got ndim={x.ndim}")
    if x.size == 0:
        raise EmptyInput("cannot filter an empty signal")
    fwd = sosfilt(spec.sections, x)
    return sosfilt(spec.sections, fwd[::-1])[::-1]


def cutoff_response(ratio: float, order: int = 5) -> float:
    """Squared-magnitude rolloff of a Butterworth filter at a frequency ratio.

    ``1 / (1 + ratio**order)`` where `ratio` compares the evaluation
    frequency to the cutoff: 1 at the cutoff gives one half; 0 gives 1.
    """
    if ratio < 0:
        raise ValueError(f"ratio must be >= 0, got {ratio}")
    return 1.0 / (1.0 + float(ratio) ** order)


# --- standardization -------------------------------------------------------

@dataclass(frozen=True)
class StandardizationStats:
    """Per-channel population mean and standard deviation."""

    channels: tuple[str, ...]
    mean: np.ndarray  # (C,)
    std: np.ndarray   # (C,)


def fit_standardizer(rec: Recording, channels: tuple[str, ...] | None = None) -> StandardizationStats:
    """Population statistics per channel; rejects flat channels by name."""
    if channels is None:
        channels = rec.channels
    missing = [c for c in channels if c not in rec.channels]
    if missing:
        raise ChannelMismatch(f"channels not in recording: {missing}")
    if rec.n_samples < 2:
        raise DegenerateChannel("need at least 2 samples to standardize")
    idx = [rec.channels.index(c) for c in channels]
    sub = rec.samples[idx]
    mean = sub.mean(axis=1)
    std = sub.std(axis=1)
    flat = np.flatnonzero(std == 0)
    if flat.size:
        raise DegenerateChannel(f"channel {channels[flat[0]]!r} has zero variance")
    return StandardizationStats(tuple(channels), mean, std)


def standardize(rec: Recording, stats: StandardizationStats) -> Recording:
    """Map each named channel to zero mean and unit variance under `stats`."""
    if set(stats.channels) != set(rec.channels):
        raise ChannelMismatch(
            f"stats cover {sorted(stats.channels)}, recording has {sorted(rec.channels)}"
        )
    out = np.empty_like(rec.samples)
    for i, name in enumerate(rec.channels):
        j = stats.channels.index(name)
        out[i] = (rec.samples[i] - stats.mean[j]) / stats.std[j]
    return rec.with_samples(out)


# --- whole-recording conditioning -------------------------------------------

def denoise_recording(rec: Recording, wav: Wavelet, levels: int,
                      threshold: float | str = "universal") -> Recording:
    """Wavelet-denoise every channel independently."""
    out = np.empty_like(rec.samples)
    for i in range(rec.n_channels):
        out[i] = wavelet_denoise(rec.samples[i], wav, levels, threshold)
    return rec.with_samples(out)


def filter_recording(rec: Recording, spec: ButterworthSpec) -> Recording:
    """Zero-phase Butterworth filter on every channel independently."""
    if spec.sample_rate != rec.sample_rate:
        raise InvalidCutoff(
            f"filter designed at {spec.sample_rate} Hz, recording is {rec.sample_rate} Hz"
        )
    out = np.empty_like(rec.samples)
    for i in range(rec.n_channels):
        out[i] = butterworth_apply(spec, rec.samples[i])
    return rec.with_samples(out)
