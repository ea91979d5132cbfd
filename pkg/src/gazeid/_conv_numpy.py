"""Pure-numpy dilated 1D convolution kernels (BLAS-backed fallback).

All arrays are float64, C-contiguous, time-major: (batch, time, channels).
Convolutions are stride-1 "same" with zero padding and odd kernel size,
so the time axis is preserved through every layer.  Each kernel tap is
one batched GEMM over a shifted window of the padded input.
"""

from __future__ import annotations

import numpy as np


def _pad(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return x
    b, t, c = x.shape
    xp = np.zeros((b, t + 2 * pad, c), dtype=x.dtype)
    xp[:, pad:pad + t, :] = x
    return xp


def conv1d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, dilation: int) -> np.ndarray:
    """y[n,t,o] = b[o] + sum_{i,j} w[o,i,j] * x[n,t+(j-K//2)*dilation,i]."""
    _, t, _ = x.shape
    _, _, k = w.shape
    pad = dilation * (k - 1) // 2
    xp = _pad(x, pad)
    y = np.matmul(xp[:, 0:t, :], w[:, :, 0].T)
    for j in range(1, k):
        y += np.matmul(xp[:, j * dilation:j * dilation + t, :], w[:, :, j].T)
    return y + b[None, None, :]


def conv1d_grad_input(gy: np.ndarray, w: np.ndarray, dilation: int) -> np.ndarray:
    """Gradient of the loss w.r.t. the convolution input."""
    _, t, _ = gy.shape
    _, ci, k = w.shape
    pad = dilation * (k - 1) // 2
    n = gy.shape[0]
    gxp = np.zeros((n, t + 2 * pad, ci), dtype=gy.dtype)
    for j in range(k):
        gxp[:, j * dilation:j * dilation + t, :] += np.matmul(gy, w[:, :, j])
    return np.ascontiguousarray(gxp[:, pad:pad + t, :])


def conv1d_grad_weights(gy: np.ndarray, x: np.ndarray, k: int, dilation: int):
    """Gradients w.r.t. weights and bias."""
    _, t, _ = gy.shape
    co = gy.shape[2]
    ci = x.shape[2]
    pad = dilation * (k - 1) // 2
    xp = _pad(x, pad)
    gw = np.empty((co, ci, k), dtype=gy.dtype)
    gyt = gy.transpose(0, 2, 1)
    for j in range(k):
        gw[:, :, j] = np.matmul(gyt, xp[:, j * dilation:j * dilation + t, :]).sum(axis=0)
    gb = gy.sum(axis=(0, 1))
    return gw, gb
