"""Grasp-and-lift EEG event detection pipeline.

Raw multichannel EEG in, six per-window event scores out: CSV/synthetic
ingestion, DWT or Butterworth denoising, standardization, causal 2D
windowing, from-scratch CNN/LSTM scoring, ROC/AUC reporting.
"""

__version__ = "0.1.0"

from . import config, data, dsp, metrics, models, pipeline, windows  # noqa: F401
from ._kernels import COMPILED  # noqa: F401
