"""Pure-numpy implementations of the hot kernels.

Used when the compiled extension is unavailable (or when
``GALDETECT_NO_EXT`` is set). Must agree with ``_ext`` to rounding error;
``tests/test_kernels.py`` enforces the parity.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

COMPILED = False


def convolve_full(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Full linear convolution y[n] = sum_k x[k] g[n-k], length n+L-1."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    n, L = x.shape[0], g.shape[0]
    y = np.zeros(n + L - 1)
    for k in range(L):
        y[k:k + n] += g[k] * x
    return y


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cascade of biquad sections, direct form II transposed, zero state."""
    sos = np.asarray(sos, dtype=np.float64)
    y = np.asarray(x, dtype=np.float64).copy()
    for b0, b1, b2, a0, a1, a2 in sos:
        z1 = 0.0
        z2 = 0.0
        for i in range(y.shape[0]):
            xi = y[i]
            yi = b0 * xi + z1
            z1 = b1 * xi - a1 * yi + z2
            z2 = b2 * xi - a2 * yi
            y[i] = yi
    return y


def _windows(x: np.ndarray, kh: int, kw: int, sh: int, sw: int,
             ph: int, pw: int) -> np.ndarray:
    """Strided (N, C, HO, WO, kh, kw) view of the zero-padded input."""
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return win[:, :, ::sh, ::sw]


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray,
                   stride: int, pad: int) -> np.ndarray:
    """Batched 2D cross-correlation: x (N,C,H,W), w (F,C,kh,kw) -> (N,F,HO,WO)."""
    kh, kw = w.shape[2], w.shape[3]
    win = _windows(x, kh, kw, stride, stride, pad, pad)
    y = np.tensordot(win, w, axes=([1, 4, 5], [1, 2, 3]))  # N,HO,WO,F
    y = np.moveaxis(y, 3, 1) + b[None, :, None, None]
    return np.ascontiguousarray(y)


def conv2d_backward(x: np.ndarray, w: np.ndarray, dy: np.ndarray,
                    stride: int, pad: int
                    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv2d_forward w.r.t. input, weights and bias."""
    N, C, H, W = x.shape
    F, _, kh, kw = w.shape
    sh = sw = stride
    ph = pw = pad
    HO, WO = dy.shape[2], dy.shape[3]

    db = dy.sum(axis=(0, 2, 3))

    win = _windows(x, kh, kw, sh, sw, ph, pw)
    dw = np.tensordot(dy, win, axes=([0, 2, 3], [0, 2, 3]))  # F,C,kh,kw
    dw = np.ascontiguousarray(dw)

    dxp = np.zeros((N, C, H + 2 * ph, W + 2 * pw))
    for i in range(kh):
        for j in range(kw):
            # contribution of every output position through kernel tap (i, j)
            contrib = np.tensordot(dy, w[:, :, i, j], axes=([1], [0]))  # N,HO,WO,C
            dxp[:, :, i:i + sh * HO:sh, j:j + sw * WO:sw] += np.moveaxis(contrib, 3, 1)
    dx = dxp[:, :, ph:ph + H, pw:pw + W]
    return np.ascontiguousarray(dx), dw, db
