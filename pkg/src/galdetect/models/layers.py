"""Neural network building blocks with explicit forward and backward passes.

Every layer caches what its backward pass needs during forward, writes
parameter gradients into ``d<name>`` attributes, and returns the gradient
with respect to its input. Arrays are float64 throughout so finite-difference
checks resolve cleanly.
"""

from __future__ import annotations

import math

import numpy as np

from .. import _kernels


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                   fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    train_only = False

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def named_params(self) -> list[tuple[str, np.ndarray]]:
        return []

    def param_grad_pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return []


class Conv2d(Layer):
    """2D convolution (cross-correlation) with zero padding."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 stride: int = 1, padding: int = 0, rng: np.random.Generator | None = None):
        if min(in_channels, out_channels, kernel_size, stride) < 1 or padding < 0:
            raise ValueError("invalid convolution geometry")
        self.stride = stride
        self.padding = padding
        k = kernel_size
        fan_in = in_channels * k * k
        fan_out = out_channels * k * k
        if rng is None:
            rng = np.random.default_rng(0)
        self.w = glorot_uniform(rng, (out_channels, in_channels, k, k), fan_in, fan_out)
        self.b = np.zeros(out_channels)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    @staticmethod
    def output_size(n: int, k: int, stride: int, padding: int) -> int:
        return (n + 2 * padding - k) // stride + 1

    def forward(self, x, train=False):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 4:
            raise ValueError(f"conv input must be (N, C, H, W), got ndim={x.ndim}")
        kh = self.w.shape[2]
        if x.shape[2] + 2 * self.padding < kh or x.shape[3] + 2 * self.padding < kh:
            raise ValueError(
                f"input {x.shape[2]}x{x.shape[3]} too small for kernel {kh} "
                f"with padding {self.padding}"
            )
        self._x = x
        return _kernels.conv2d_forward(x, self.w, self.b, self.stride, self.padding)

    def backward(self, dy):
        dy = np.ascontiguousarray(dy, dtype=np.float64)
        dx, dw, db = _kernels.conv2d_backward(self._x, self.w, dy, self.stride, self.padding)
        self.dw = dw
        self.db = db
        return dx

    def named_params(self):
        return [("w", self.w), ("b", self.b)]

    def param_grad_pairs(self):
        return [(self.w, self.dw), (self.b, self.db)]


class BatchNorm(Layer):
    """Batch normalization over the batch (and spatial axes for 4D input).

    Training mode normalizes with the current batch's population statistics
    and blends them into running estimates; inference mode uses the running
    estimates alone.
    """

    def __init__(self, num_features: int, momentum: float = 0.1, epsilon: float = 1e-5):
        if not 0 < momentum <= 1 or epsilon <= 0:
            raise ValueError("momentum in (0, 1], epsilon > 0 required")
        self.gamma = np.ones(num_features)
        self.beta = np.zeros(num_features)
        self.running_mean = np.zeros(num_features)
        self.running_var = np.ones(num_features)
        self.momentum = momentum
        self.epsilon = epsilon
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)
        self._cache = None

    def _axes(self, x):
        if x.ndim == 4:
            return (0, 2, 3)
        if x.ndim == 2:
            return (0,)
        raise ValueError(f"batch norm expects 2D or 4D input, got ndim={x.ndim}")

    def _shape(self, x):
        return (1, -1, 1, 1) if x.ndim == 4 else (1, -1)

    def forward(self, x, train=False):
        x = np.asarray(x, dtype=np.float64)
        axes = self._axes(x)
        shape = self._shape(x)
        if train:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)  # population variance, matches inference
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * var
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        xhat = (x - mean.reshape(shape)) * inv_std.reshape(shape)
        self._cache = (xhat, inv_std, axes, shape, train)
        return self.gamma.reshape(shape) * xhat + self.beta.reshape(shape)

    def backward(self, dy):
        xhat, inv_std, axes, shape, train = self._cache
        self.dgamma = (dy * xhat).sum(axis=axes)
        self.dbeta = dy.sum(axis=axes)
        dxhat = dy * self.gamma.reshape(shape)
        if not train:
            # running statistics are constants, so the map is affine
            return dxhat * inv_std.reshape(shape)
        # batch statistics are functions of the input, so their gradients
        # flow back through the normalization
        term = (dxhat - dxhat.mean(axis=axes).reshape(shape)
                - xhat * (dxhat * xhat).mean(axis=axes).reshape(shape))
        return term * inv_std.reshape(shape)

    def named_params(self):
        return [("gamma", self.gamma), ("beta", self.beta)]

    def param_grad_pairs(self):
        return [(self.gamma, self.dgamma), (self.beta, self.dbeta)]

    def named_state(self):
        return [("running_mean", self.running_mean), ("running_var", self.running_var)]


class Dense(Layer):
    def __init__(self, in_features: int, out_features: int,
                 rng: np.random.Generator | None = None):
        if rng is None:
            rng = np.random.default_rng(0)
        self.w = glorot_uniform(rng, (out_features, in_features), in_features, out_features)
        self.b = np.zeros(out_features)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x = None

    def forward(self, x, train=False):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.w.shape[1]:
            raise ValueError(f"dense expects (N, {self.w.shape[1]}), got {x.shape}")
        self._x = x
        return x @ self.w.T + self.b

    def backward(self, dy):
        self.dw = dy.T @ self._x
        self.db = dy.sum(axis=0)
        return dy @ self.w

    def named_params(self):
        return [("w", self.w), ("b", self.b)]

    def param_grad_pairs(self):
        return [(self.w, self.dw), (self.b, self.db)]


class ReLU(Layer):
    def forward(self, x, train=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0.0)


class Sigmoid(Layer):
    def forward(self, x, train=False):
        self._y = sigmoid(x)
        return self._y

    def backward(self, dy):
        return dy * self._y * (1.0 - self._y)


class Flatten(Layer):
    def forward(self, x, train=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


class Dropout(Layer):
    """Inverted dropout: rescale survivors by 1/(1-p) so inference is identity."""

    train_only = True

    def __init__(self, p: float, rng: np.random.Generator):
        if not 0 <= p < 1:
            raise ValueError(f"dropout probability must be in [0, 1), got {p}")
        self.p = p
        self.rng = rng
        self._mask = None

    def forward(self, x, train=False):
        if not train or self.p == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.p
        self._mask = (self.rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, dy):
        if self._mask is None:
            return dy
        return dy * self._mask


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


BCE_CLAMP = 1e-7


def bce_loss(scores: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy over every element, with its gradient.

    Scores are clamped to [1e-7, 1 - 1e-7] before the logs; the gradient is
    zero where the clamp is active (the clamped value ignores the raw score).
    """
    scores = np.asarray(scores, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if scores.shape != targets.shape:
        raise ValueError(f"shape mismatch: {scores.shape} vs {targets.shape}")
    s = np.clip(scores, BCE_CLAMP, 1.0 - BCE_CLAMP)
    loss = -(targets * np.log(s) + (1.0 - targets) * np.log(1.0 - s)).mean()
    grad = (s - targets) / (s * (1.0 - s)) / scores.size
    grad = np.where((scores > BCE_CLAMP) & (scores < 1.0 - BCE_CLAMP), grad, 0.0)
    return float(loss), grad
