"""Window scorers: layers, assembly, optimization, training, persistence."""

from .checkpoint import load_checkpoint, save_checkpoint
from .layers import (
    BatchNorm,
    Conv2d,
    Dense,
    Dropout,
    Flatten,
    ReLU,
    Sigmoid,
    bce_loss,
    sigmoid,
)
from .lstm import LastStep, LstmLayer
from .networks import Model, ModelConfig, build_model
from .optim import Adam, Sgd, clip_gradients, make_optimizer
from .training import (
    EpochRecord,
    TrainConfig,
    TrainResult,
    predict,
    trace_to_csv,
    train_model,
)

__all__ = [
    "Adam",
    "BatchNorm",
    "Conv2d",
    "Dense",
    "Dropout",
    "EpochRecord",
    "Flatten",
    "LastStep",
    "LstmLayer",
    "Model",
    "ModelConfig",
    "ReLU",
    "Sgd",
    "Sigmoid",
    "TrainConfig",
    "TrainResult",
    "bce_loss",
    "build_model",
    "clip_gradients",
    "load_checkpoint",
    "make_optimizer",
    "predict",
    "save_checkpoint",
    "sigmoid",
    "trace_to_csv",
    "train_model",
]
