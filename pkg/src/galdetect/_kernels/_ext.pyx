# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: dense convolution, biquad cascade filtering,
and conv2d forward/backward for the scoring models."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

COMPILED = True


def convolve_full(x, g):
    """Full linear convolution y[n] = sum_k x[k] g[n-k], length n+L-1."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], L = gv.shape[0]
    out = np.zeros(n + L - 1, dtype=np.float64)
    cdef double[::1] yv = out
    cdef Py_ssize_t k, i
    cdef double gk
    for k in range(L):
        gk = gv[k]
        for i in range(n):
            yv[k + i] += gk * xv[i]
    return out


def sosfilt(sos, x):
    """Cascade of biquad sections, direct form II transposed, zero state."""
    cdef double[:, ::1] sv = np.ascontiguousarray(sos, dtype=np.float64)
    out = np.array(x, dtype=np.float64, copy=True)
    cdef double[::1] yv = out
    cdef Py_ssize_t n = yv.shape[0], s, i
    cdef double b0, b1, b2, a1, a2, z1, z2, xi, yi
    for s in range(sv.shape[0]):
        b0 = sv[s, 0]; b1 = sv[s, 1]; b2 = sv[s, 2]
        a1 = sv[s, 4]; a2 = sv[s, 5]
        z1 = 0.0
        z2 = 0.0
        for i in range(n):
            xi = yv[i]
            yi = b0 * xi + z1
            z1 = b1 * xi - a1 * yi + z2
            z2 = b2 * xi - a2 * yi
            yv[i] = yi
    return out


def conv2d_forward(x, w, b, stride, pad):
    """Batched 2D cross-correlation: x (N,C,H,W), w (F,C,kh,kw) -> (N,F,HO,WO)."""
    cdef double[:, :, :, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, :, :, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t N = xv.shape[0], C = xv.shape[1], H = xv.shape[2], W = xv.shape[3]
    cdef Py_ssize_t F = wv.shape[0], kh = wv.shape[2], kw = wv.shape[3]
    cdef Py_ssize_t sh = stride, sw = stride, ph = pad, pw = pad
    cdef Py_ssize_t HO = (H + 2 * ph - kh) // sh + 1
    cdef Py_ssize_t WO = (W + 2 * pw - kw) // sw + 1
    out = np.empty((N, F, HO, WO), dtype=np.float64)
    cdef double[:, :, :, ::1] yv = out
    cdef Py_ssize_t n, f, c, oh, ow, i, j, ih, iw
    cdef double acc, wfcij
    for n in range(N):
        for f in range(F):
            for oh in range(HO):
                for ow in range(WO):
                    yv[n, f, oh, ow] = bv[f]
            for c in range(C):
                for i in range(kh):
                    for j in range(kw):
                        wfcij = wv[f, c, i, j]
                        if wfcij == 0.0:
                            continue
                        for oh in range(HO):
                            ih = oh * sh + i - ph
                            if ih < 0 or ih >= H:
                                continue
                            for ow in range(WO):
                                iw = ow * sw + j - pw
                                if 0 <= iw < W:
                                    yv[n, f, oh, ow] += wfcij * xv[n, c, ih, iw]
    return out


def conv2d_backward(x, w, dy, stride, pad):
    """Gradients of conv2d_forward w.r.t. input, weights and bias."""
    cdef double[:, :, :, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, :, :, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, :, :, ::1] dyv = np.ascontiguousarray(dy, dtype=np.float64)
    cdef Py_ssize_t N = xv.shape[0], C = xv.shape[1], H = xv.shape[2], W = xv.shape[3]
    cdef Py_ssize_t F = wv.shape[0], kh = wv.shape[2], kw = wv.shape[3]
    cdef Py_ssize_t sh = stride, sw = stride, ph = pad, pw = pad
    cdef Py_ssize_t HO = dyv.shape[2], WO = dyv.shape[3]

    dx = np.zeros((N, C, H, W), dtype=np.float64)
    dw = np.zeros((F, C, kh, kw), dtype=np.float64)
    db = np.zeros(F, dtype=np.float64)
    cdef double[:, :, :, ::1] dxv = dx
    cdef double[:, :, :, ::1] dwv = dw
    cdef double[::1] dbv = db
    cdef Py_ssize_t n, f, c, oh, ow, i, j, ih, iw
    cdef double g, wfcij, acc

    for n in range(N):
        for f in range(F):
            for oh in range(HO):
                for ow in range(WO):
                    dbv[f] += dyv[n, f, oh, ow]
            for c in range(C):
                for i in range(kh):
                    for j in range(kw):
                        wfcij = wv[f, c, i, j]
                        acc = 0.0
                        for oh in range(HO):
                            ih = oh * sh + i - ph
                            if ih < 0 or ih >= H:
                                continue
                            for ow in range(WO):
                                iw = ow * sw + j - pw
                                if 0 <= iw < W:
                                    g = dyv[n, f, oh, ow]
                                    acc += g * xv[n, c, ih, iw]
                                    dxv[n, c, ih, iw] += g * wfcij
                        dwv[f, c, i, j] += acc
    return dx, dw, db
