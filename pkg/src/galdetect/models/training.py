"""Mini-batch training loop with per-epoch validation and best-epoch selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSet, NonFiniteLoss
from ..metrics import evaluate
from ..rng import substream
from ..windows import WindowBatch
from .layers import bce_loss
from .networks import Model, ModelConfig, build_model
from .optim import clip_gradients, make_optimizer


@dataclass(frozen=True)
class TrainConfig:
    """Optimization hyperparameters."""

    optimizer: str = "adam"
    learning_rate: float = 1e-3
    momentum: float = 0.9
    epochs: int = 20
    batch_size: int = 64
    grad_clip: float = 0.0  # 0 disables clipping

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate < 0 or self.grad_clip < 0:
            raise ValueError("learning_rate and grad_clip must be >= 0")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_auc: float


@dataclass(frozen=True)
class TrainResult:
    model: Model
    trace: tuple[EpochRecord, ...]
    best_epoch: int
    best_val_auc: float


def predict(model: Model, samples: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """Inference-mode scores, batched to bound memory."""
    chunks = []
    for start in range(0, samples.shape[0], batch_size):
        chunks.append(model.forward(samples[start:start + batch_size], train=False))
    return np.concatenate(chunks, axis=0)


def train_model(model_config: ModelConfig, train_config: TrainConfig,
                train_batch: WindowBatch, val_batch: WindowBatch,
                seed: int) -> TrainResult:
    """Train a scorer and return it at its best-validation-AUC epoch.

    All randomness descends from `seed` through the named substreams
    'init' (weights), 'shuffle' (batch order), and 'dropout' (masks).
    The returned model carries the parameters of the epoch with the highest
    validation AUC, not necessarily the last.
    """
    if train_batch.n_windows == 0:
        raise EmptyTrainingSet("no training windows")
    per_event = train_batch.targets.sum(axis=0)
    if not np.logical_and(per_event > 0, per_event < train_batch.n_windows).any():
        raise EmptyTrainingSet(
            "every event is single-class in the training windows; nothing to learn"
        )

    init_rng = substream(seed, "init")
    dropout_rng = substream(seed, "dropout")
    shuffle_rng = substream(seed, "shuffle")
    input_shape = train_batch.samples.shape[1:]
    model = build_model(model_config, input_shape, init_rng, dropout_rng)
    opt = make_optimizer(train_config.optimizer, train_config.learning_rate,
                         train_config.momentum)

    x = train_batch.samples
    y = train_batch.targets.astype(np.float64)
    trace: list[EpochRecord] = []
    best_epoch = 0
    best_auc = -np.inf
    best_state: dict[str, np.ndarray] | None = None

    for epoch in range(1, train_config.epochs + 1):
        perm = shuffle_rng.permutation(train_batch.n_windows)
        losses = []
        for b, start in enumerate(range(0, perm.size, train_config.batch_size)):
            idx = perm[start:start + train_config.batch_size]
            scores = model.forward(x[idx], train=True)
            loss, dscores = bce_loss(scores, y[idx])
            if not np.isfinite(loss):
                raise NonFiniteLoss(
                    f"loss became {loss} at epoch {epoch}, batch {b}",
                    epoch=epoch, batch=b,
                )
            model.backward(dscores)
            pairs = model.param_grad_pairs()
            if train_config.grad_clip > 0:
                clip_gradients(pairs, train_config.grad_clip)
            opt.step(pairs)
            losses.append(loss)
        val_scores = predict(model, val_batch.samples)
        val_auc = evaluate(val_scores, val_batch.targets).mean_auc
        trace.append(EpochRecord(epoch, float(np.mean(losses)), float(val_auc)))
        if val_auc > best_auc:
            best_auc = float(val_auc)
            best_epoch = epoch
            best_state = model.get_state()

    model.set_state(best_state)
    return TrainResult(model, tuple(trace), best_epoch, best_auc)


def trace_to_csv(result: TrainResult) -> str:
    """Epoch-by-epoch log plus a final row restating the selected epoch."""
    lines = ["epoch,train_loss,val_auc"]
    for rec in result.trace:
        lines.append(f"{rec.epoch},{repr(rec.train_loss)},{repr(rec.val_auc)}")
    lines.append(f"best,{result.best_epoch},{repr(result.best_val_auc)}")
    return "\n".join(lines) + "\n"
