"""NumPy building blocks with explicit forward and backward passes.

Every forward function returns a cache that its backward twin consumes, in
the classic step-forward/step-backward style; nothing here depends on an
autograd framework, which is what makes the finite-difference gradient
check meaningful.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    expx = np.exp(x[~positive])
    out[~positive] = expx / (1.0 + expx)
    return out


def softplus(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def lstm_step_forward(x, h_prev, c_prev, Wx, Wh, b):
    """One LSTM step for a batch.

    x: (N, D) inputs; h_prev, c_prev: (N, H) previous state; Wx: (D, 4H);
    Wh: (H, 4H); b: (4H,). Gate order along the 4H axis is i, f, g, o.
    """
    H = h_prev.shape[1]
    gates = x @ Wx + h_prev @ Wh + b
    i = sigmoid(gates[:, :H])
    f = sigmoid(gates[:, H : 2 * H])
    g = np.tanh(gates[:, 2 * H : 3 * H])
    o = sigmoid(gates[:, 3 * H :])
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    cache = (x, h_prev, c_prev, i, f, g, o, tanh_c, Wx, Wh)
    return h, c, cache


def lstm_step_backward(dh, dc, cache):
    """Backward for one step; dh/dc are gradients flowing into h and c."""
    x, h_prev, c_prev, i, f, g, o, tanh_c, Wx, Wh = cache
    do = dh * tanh_c
    dc_total = dc + dh * o * (1.0 - tanh_c * tanh_c)
    di = dc_total * g
    df = dc_total * c_prev
    dg = dc_total * i
    dc_prev = dc_total * f

    d_gates = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    dx = d_gates @ Wx.T
    dh_prev = d_gates @ Wh.T
    dWx = x.T @ d_gates
    dWh = h_prev.T @ d_gates
    db = d_gates.sum(axis=0)
    return dx, dh_prev, dc_prev, dWx, dWh, db


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
