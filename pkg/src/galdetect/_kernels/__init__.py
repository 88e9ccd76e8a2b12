"""Hot-kernel dispatch.

The compiled Cython extension is preferred; the numpy fallback keeps the
package importable from a plain source checkout. Set ``GALDETECT_NO_EXT=1``
to force the fallback (used by the benchmark and parity tests).
"""

from __future__ import annotations

import os

from . import fallback

if os.environ.get("GALDETECT_NO_EXT"):
    _impl = fallback
else:
    try:
        from . import _ext as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = fallback

COMPILED: bool = bool(_impl.COMPILED)
convolve_full = _impl.convolve_full
sosfilt = _impl.sosfilt
conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward

__all__ = [
    "COMPILED",
    "convolve_full",
    "sosfilt",
    "conv2d_forward",
    "conv2d_backward",
    "fallback",
]
