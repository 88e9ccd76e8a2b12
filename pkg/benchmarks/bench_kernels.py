"""Timing comparison of the compiled hot kernels against the numpy fallback.

Runs each kernel on sizes representative of the training workload and
reports per-call wall time for both implementations plus the speedup.
The compiled extension must be built (``pip install -e .``) for the
comparison column to appear; otherwise only the fallback is timed.

Usage::

    python benchmarks/bench_kernels.py [--repeats 20] [--heavy]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from galdetect._kernels import fallback

try:
    from galdetect._kernels import _ext
except ImportError:
    _ext = None


def _time(fn, repeats: int) -> float:
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _cases(heavy: bool):
    rng = np.random.default_rng(0)
    n_sig = 48000 if heavy else 12000
    x1 = rng.standard_normal(n_sig)
    g = rng.standard_normal(4)
    sos = np.array([[0.2, 0.1, 0.05, 1.0, -0.3, 0.2],
                    [0.5, -0.2, 0.1, 1.0, 0.1, -0.4],
                    [0.3, 0.0, -0.1, 1.0, -0.2, 0.05]])
    batch = 128 if heavy else 64
    xc = rng.standard_normal((batch, 1, 8, 96))
    w1 = rng.standard_normal((12, 1, 7, 7))
    b1 = rng.standard_normal(12)
    y1_shape = fallback.conv2d_forward(xc[:1], w1, b1, 2, 3).shape[1:]
    dy = rng.standard_normal((batch, *y1_shape))

    yield ("convolve_full", f"n={n_sig}, L=4",
           lambda impl: impl.convolve_full(x1, g))
    yield ("sosfilt", f"3 sections, n={n_sig}",
           lambda impl: impl.sosfilt(sos, x1))
    yield ("conv2d_forward", f"x({batch},1,8,96) w(12,1,7,7) s2 p3",
           lambda impl: impl.conv2d_forward(xc, w1, b1, 2, 3))
    yield ("conv2d_backward", f"same shape, dy{dy.shape}",
           lambda impl: impl.conv2d_backward(xc, w1, dy, 2, 3))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timed repetitions per kernel (best is kept)")
    parser.add_argument("--heavy", action="store_true",
                        help="use larger workloads")
    args = parser.parse_args()

    if _ext is None:
        print("compiled extension not built; timing fallback only\n")
    header = f"{'kernel':<18} {'workload':<34} {'fallback':>10}"
    if _ext is not None:
        header += f" {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, desc, call in _cases(args.heavy):
        t_fb = _time(lambda: call(fallback), args.repeats)
        row = f"{name:<18} {desc:<34} {t_fb * 1e3:9.3f}ms"
        if _ext is not None:
            t_ext = _time(lambda: call(_ext), args.repeats)
            row += f" {t_ext * 1e3:9.3f}ms {t_fb / t_ext:7.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
