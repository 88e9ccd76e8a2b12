"""Long short-term memory layer with full backpropagation through time."""

from __future__ import annotations

import numpy as np

from .layers import Layer, glorot_uniform, sigmoid


class LstmLayer(Layer):
    """Recurrent layer mapping (N, T, D) sequences to (N, T, H) hidden states.

    Gate pre-activations are packed row-wise as [input, forget, output,
    candidate]. The forget-gate bias starts at 1 so early training keeps
    cell memory open. State starts at zero each call.
    """

    def __init__(self, in_features: int, hidden_size: int,
                 rng: np.random.Generator | None = None, forget_bias: float = 1.0):
        if in_features < 1 or hidden_size < 1:
            raise ValueError("in_features and hidden_size must be >= 1")
        if rng is None:
            rng = np.random.default_rng(0)
        H, D = hidden_size, in_features
        self.hidden_size = H
        self.w = glorot_uniform(rng, (4 * H, D), D + H, H)
        self.u = glorot_uniform(rng, (4 * H, H), D + H, H)
        self.b = np.zeros(4 * H)
        self.b[H:2 * H] = forget_bias
        self.dw = np.zeros_like(self.w)
        self.du = np.zeros_like(self.u)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def step(self, x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
        """One recurrence step; returns (h, c, gate cache)."""
        H = self.hidden_size
        a = x_t @ self.w.T + h_prev @ self.u.T + self.b
        i = sigmoid(a[:, :H])
        f = sigmoid(a[:, H:2 * H])
        o = sigmoid(a[:, 2 * H:3 * H])
        g = np.tanh(a[:, 3 * H:])
        c = f * c_prev + i * g
        hc = np.tanh(c)
        h = o * hc
        return h, c, (x_t, h_prev, c_prev, i, f, o, g, hc)

    def forward(self, x, train=False):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[2] != self.w.shape[1]:
            raise ValueError(f"lstm expects (N, T, {self.w.shape[1]}), got {x.shape}")
        N, T, _ = x.shape
        H = self.hidden_size
        h = np.zeros((N, H))
        c = np.zeros((N, H))
        out = np.empty((N, T, H))
        caches = []
        for t in range(T):
            h, c, cache = self.step(x[:, t], h, c)
            out[:, t] = h
            caches.append(cache)
        self._cache = (x.shape, caches)
        return out

    def backward(self, dy):
        (N, T, D), caches = self._cache
        H = self.hidden_size
        dx = np.empty((N, T, D))
        dh_next = np.zeros((N, H))
        dc_next = np.zeros((N, H))
        dw = np.zeros_like(self.w)
        du = np.zeros_like(self.u)
        db = np.zeros_like(self.b)
        for t in range(T - 1, -1, -1):
            x_t, h_prev, c_prev, i, f, o, g, hc = caches[t]
            dh = dy[:, t] + dh_next
            do = dh * hc
            dc = dc_next + dh * o * (1.0 - hc * hc)
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            da = np.concatenate(
                [di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g * g)],
                axis=1,
            )
            dw += da.T @ x_t
            du += da.T @ h_prev
            db += da.sum(axis=0)
            dx[:, t] = da @ self.w
            dh_next = da @ self.u
            dc_next = dc * f
        self.dw, self.du, self.db = dw, du, db
        return dx

    def named_params(self):
        return [("w", self.w), ("u", self.u), ("b", self.b)]

    def param_grad_pairs(self):
        return [(self.w, self.dw), (self.u, self.du), (self.b, self.db)]


class LastStep(Layer):
    """Keep only the final time step of a sequence."""

    def forward(self, x, train=False):
        self._shape = x.shape
        return x[:, -1, :]

    def backward(self, dy):
        dx = np.zeros(self._shape)
        dx[:, -1, :] = dy
        return dx
