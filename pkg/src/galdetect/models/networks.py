"""Assembly of the two window scorers and shared model plumbing.

Both scorers consume a window batch shaped (W, C, T) and emit six
per-event probabilities per window. The convolutional scorer treats each
window as a one-plane image (channels x time); the recurrent scorer walks
the window sample by sample with the channel vector as input features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import N_EVENTS
from .layers import BatchNorm, Conv2d, Dense, Dropout, Flatten, Layer, ReLU, Sigmoid
from .lstm import LastStep, LstmLayer


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters for either scorer."""

    architecture: str = "cnn"
    conv1_channels: int = 16
    conv2_channels: int = 32
    kernel_size: int = 3
    conv_stride: int = 2
    fc_width: int = 64
    hidden_size: int = 64
    lstm_layers: int = 4
    dropout: float = 0.3

    def __post_init__(self):
        if self.architecture not in ("cnn", "lstm"):
            raise ValueError(f"architecture must be 'cnn' or 'lstm', got {self.architecture!r}")
        if min(self.conv1_channels, self.conv2_channels, self.kernel_size,
               self.conv_stride, self.fc_width, self.hidden_size, self.lstm_layers) < 1:
            raise ValueError("all size fields must be >= 1")
        if not 0 <= self.dropout < 1:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")


class Model:
    """A stack of layers plus the input adaptation for its architecture.

    'image' models insert a plane axis, (W, C, T) -> (W, 1, C, T);
    'sequence' models put time first per window, (W, C, T) -> (W, T, C).
    """

    def __init__(self, layers: list[Layer], input_kind: str, config: ModelConfig,
                 input_shape: tuple[int, int]):
        self.layers = layers
        self.input_kind = input_kind
        self.config = config
        self.input_shape = input_shape  # (C, T)

    def _adapt(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[1:] != self.input_shape:
            raise ValueError(f"expected (W, {self.input_shape[0]}, {self.input_shape[1]}), got {x.shape}")
        if self.input_kind == "image":
            return x[:, None, :, :]
        return np.ascontiguousarray(x.transpose(0, 2, 1))

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        h = self._adapt(x)
        for layer in self.layers:
            h = layer.forward(h, train=train)
        return h

    def backward(self, dy: np.ndarray) -> None:
        for layer in reversed(self.layers):
            dy = layer.backward(dy)

    def named_params(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, layer in enumerate(self.layers):
            for name, arr in layer.named_params():
                out.append((f"layer{i}.{name}", arr))
            if isinstance(layer, BatchNorm):
                for name, arr in layer.named_state():
                    out.append((f"layer{i}.{name}", arr))
        return out

    def param_grad_pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        pairs = []
        for layer in self.layers:
            pairs.extend(layer.param_grad_pairs())
        return pairs

    def num_params(self) -> int:
        return sum(arr.size for layer in self.layers
                   for _, arr in layer.named_params())

    def get_state(self) -> dict[str, np.ndarray]:
        return {name: arr.copy() for name, arr in self.named_params()}

    def set_state(self, state: dict[str, np.ndarray]) -> None:
        current = dict(self.named_params())
        if set(state) != set(current):
            raise ValueError(
                f"state keys do not match model: missing {sorted(set(current) - set(state))}, "
                f"extra {sorted(set(state) - set(current))}"
            )
        for i, layer in enumerate(self.layers):
            for attr in ("w", "u", "b", "gamma", "beta", "running_mean", "running_var"):
                key = f"layer{i}.{attr}"
                if key in state:
                    stored = np.asarray(state[key], dtype=np.float64)
                    target = getattr(layer, attr)
                    if stored.shape != target.shape:
                        raise ValueError(f"{key}: shape {stored.shape} != {target.shape}")
                    target[...] = stored


def build_model(config: ModelConfig, input_shape: tuple[int, int],
                init_rng: np.random.Generator,
                dropout_rng: np.random.Generator | None = None) -> Model:
    if config.architecture == "cnn":
        return _build_cnn(config, input_shape, init_rng)
    return _build_lstm(config, input_shape, init_rng, dropout_rng)


def _build_cnn(config: ModelConfig, input_shape: tuple[int, int],
               rng: np.random.Generator) -> Model:
    C, T = input_shape
    k, s = config.kernel_size, config.conv_stride
    pad = k // 2
    h1 = Conv2d.output_size(C, k, s, pad)
    w1 = Conv2d.output_size(T, k, s, pad)
    h2 = Conv2d.output_size(h1, k, s, pad)
    w2 = Conv2d.output_size(w1, k, s, pad)
    if min(h1, w1, h2, w2) < 1:
        raise ValueError(f"window {C}x{T} too small for two stride-{s} convolutions")
    flat = config.conv2_channels * h2 * w2
    layers: list[Layer] = [
        Conv2d(1, config.conv1_channels, k, stride=s, padding=pad, rng=rng),
        BatchNorm(config.conv1_channels),
        ReLU(),
        Conv2d(config.conv1_channels, config.conv2_channels, k, stride=s, padding=pad, rng=rng),
        BatchNorm(config.conv2_channels),
        ReLU(),
        Flatten(),
        Dense(flat, config.fc_width, rng=rng),
        ReLU(),
        Dense(config.fc_width, N_EVENTS, rng=rng),
        Sigmoid(),
    ]
    return Model(layers, "image", config, input_shape)


def _build_lstm(config: ModelConfig, input_shape: tuple[int, int],
                rng: np.random.Generator,
                dropout_rng: np.random.Generator | None) -> Model:
    C, _ = input_shape
    if dropout_rng is None:
        dropout_rng = np.random.default_rng(0)
    layers: list[Layer] = []
    in_features = C
    for _ in range(config.lstm_layers):
        layers.append(LstmLayer(in_features, config.hidden_size, rng=rng))
        layers.append(Dropout(config.dropout, dropout_rng))
        in_features = config.hidden_size
    layers.append(LastStep())
    layers.append(Dense(config.hidden_size, N_EVENTS, rng=rng))
    layers.append(Sigmoid())
    return Model(layers, "sequence", config, input_shape)
