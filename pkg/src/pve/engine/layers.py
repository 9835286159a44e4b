"""Per-layer forward and backward kernels.

All kernels compute in float64 regardless of the storage dtype of weights
and inputs; reductions (conv and dense dot products) therefore accumulate
at 64-bit precision. Outputs are float64 arrays and are cached as-is in
the forward trace so the backward pass sees unquantized activations.

Backward kernels return the gradient with respect to the layer input and,
when asked, the gradients with respect to the layer's weights and bias
(consumed by the training loop; inference-time saliency only needs the
input path).
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray,
                   stride: int, padding: int) -> np.ndarray:
    """x: (H, W, Cin), w: (kh, kw, Cin, Cout), b: (Cout,) -> (H', W', Cout)."""
    kh, kw, cin, cout = w.shape
    xp = np.pad(x, ((padding, padding), (padding, padding), (0, 0)))
    # (H'', W'', Cin, kh, kw) view, strided down to the output grid
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))[::stride, ::stride]
    oh, ow = win.shape[0], win.shape[1]
    cols = win.transpose(0, 1, 3, 4, 2).reshape(oh * ow, kh * kw * cin)
    y = cols @ w.reshape(kh * kw * cin, cout) + b
    return y.reshape(oh, ow, cout)


def conv2d_backward(x: np.ndarray, w: np.ndarray, dy: np.ndarray,
                    stride: int, padding: int,
                    want_weights: bool = False):
    """Returns (dx, dw, db); dw/db are None unless want_weights."""
    kh, kw, cin, cout = w.shape
    oh, ow, _ = dy.shape
    dy_mat = dy.reshape(oh * ow, cout)

    dcols = dy_mat @ w.reshape(kh * kw * cin, cout).T
    dcols = dcols.reshape(oh, ow, kh, kw, cin)

    ph, pw = x.shape[0] + 2 * padding, x.shape[1] + 2 * padding
    dxp = np.zeros((ph, pw, cin))
    for di in range(kh):
        for dj in range(kw):
            dxp[di:di + stride * oh:stride, dj:dj + stride * ow:stride] += dcols[:, :, di, dj]
    dx = dxp[padding:ph - padding, padding:pw - padding]

    dw = db = None
    if want_weights:
        xp = np.pad(x, ((padding, padding), (padding, padding), (0, 0)))
        win = sliding_window_view(xp, (kh, kw), axis=(0, 1))[::stride, ::stride]
        cols = win.transpose(0, 1, 3, 4, 2).reshape(oh * ow, kh * kw * cin)
        dw = (cols.T @ dy_mat).reshape(kh, kw, cin, cout)
        db = dy_mat.sum(axis=0)
    return dx, dw, db


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    # strictly-positive mask: pre-activations at exactly 0 get zero gradient
    return dy * (x > 0.0)


def maxpool2d_forward(x: np.ndarray, pool_size: int, stride: int) -> np.ndarray:
    win = sliding_window_view(x, (pool_size, pool_size), axis=(0, 1))[::stride, ::stride]
    return win.max(axis=(3, 4))


def maxpool2d_backward(x: np.ndarray, dy: np.ndarray,
                       pool_size: int, stride: int) -> np.ndarray:
    """Routes gradient to the first maximal element of each window in
    row-major scan order, which is what flat argmax yields."""
    win = sliding_window_view(x, (pool_size, pool_size), axis=(0, 1))[::stride, ::stride]
    oh, ow, c = dy.shape
    flat = win.reshape(oh, ow, c, pool_size * pool_size)
    arg = flat.argmax(axis=3)
    dx = np.zeros_like(x)
    for p in range(pool_size * pool_size):
        di, dj = divmod(p, pool_size)
        contrib = dy * (arg == p)
        dx[di:di + stride * oh:stride, dj:dj + stride * ow:stride] += contrib
    return dx


def global_avg_pool_forward(x: np.ndarray) -> np.ndarray:
    return x.mean(axis=(0, 1))


def global_avg_pool_backward(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    h, w, _ = x.shape
    return np.broadcast_to(dy / (h * w), x.shape).copy()


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x: any shape flattening to (in,), w: (in, out), b: (out,)."""
    return x.reshape(-1) @ w + b


def dense_backward(x: np.ndarray, w: np.ndarray, dy: np.ndarray,
                   want_weights: bool = False):
    dx = (dy @ w.T).reshape(x.shape)
    dw = db = None
    if want_weights:
        dw = np.outer(x.reshape(-1), dy)
        db = dy.copy()
    return dx, dw, db


def sigmoid(x):
    """Numerically stable logistic function, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out
