"""Gradient-descent parameter updates."""

from __future__ import annotations

import math

import numpy as np


class Sgd:
    """Stochastic gradient descent with classical momentum."""

    def __init__(self, learning_rate: float, momentum: float = 0.0):
        if learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {learning_rate}")
        if not 0 <= momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        self.lr = learning_rate
        self.momentum = momentum
        self._velocity: list[np.ndarray] | None = None

    def step(self, pairs: list[tuple[np.ndarray, np.ndarray]]) -> None:
        if self._velocity is None:
            self._velocity = [np.zeros_like(p) for p, _ in pairs]
        for (param, grad), v in zip(pairs, self._velocity):
            v *= self.momentum
            v -= self.lr * grad
            param += v


class Adam:
    """Adam with bias-corrected first and second moment estimates."""

    def __init__(self, learning_rate: float, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        if learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {learning_rate}")
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1) or epsilon <= 0:
            raise ValueError("betas in [0, 1) and epsilon > 0 required")
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None
        self._t = 0

    def step(self, pairs: list[tuple[np.ndarray, np.ndarray]]) -> None:
        if self._m is None:
            self._m = [np.zeros_like(p) for p, _ in pairs]
            self._v = [np.zeros_like(p) for p, _ in pairs]
        self._t += 1
        correct1 = 1.0 - self.beta1 ** self._t
        correct2 = 1.0 - self.beta2 ** self._t
        for (param, grad), m, v in zip(pairs, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            mhat = m / correct1
            vhat = v / correct2
            param -= self.lr * mhat / (np.sqrt(vhat) + self.epsilon)


def make_optimizer(name: str, learning_rate: float, momentum: float = 0.9):
    if name == "adam":
        return Adam(learning_rate)
    if name == "sgd":
        return Sgd(learning_rate, momentum)
    raise ValueError(f"optimizer must be 'adam' or 'sgd', got {name!r}")


def clip_gradients(pairs: list[tuple[np.ndarray, np.ndarray]], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most `max_norm`."""
    total = math.sqrt(sum(float((g * g).sum()) for _, g in pairs))
    if total > max_norm > 0:
        scale = max_norm / total
        for _, g in pairs:
            g *= scale
    return total
